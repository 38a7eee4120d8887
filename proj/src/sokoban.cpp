#include "envforge/sokoban.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <stdexcept>

#include "envforge/error.hpp"
#include "envforge/rng.hpp"

namespace envforge::sokoban {

std::string_view to_string(Dir d) noexcept {
    switch (d) {
        case Dir::up: return "up";
        case Dir::down: return "down";
        case Dir::left: return "left";
        case Dir::right: return "right";
    }
    return "?";
}

std::optional<Dir> dir_from_string(std::string_view s) noexcept {
    for (Dir d : kAllDirs) {
        if (to_string(d) == s) {
            return d;
        }
    }
    return std::nullopt;
}

Pos step(Pos p, Dir d) noexcept {
    switch (d) {
        case Dir::up: return {p.row - 1, p.col};
        case Dir::down: return {p.row + 1, p.col};
        case Dir::left: return {p.row, p.col - 1};
        case Dir::right: return {p.row, p.col + 1};
    }
    return p;
}

State make_bordered(int height, int width, Pos player, Pos box, Pos goal) {
    if (height < 3 || width < 3) {
        throw std::invalid_argument("sokoban board must be at least 3x3");
    }
    State s;
    s.height = height;
    s.width = width;
    s.walls.assign(static_cast<std::size_t>(height * width), 0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (r == 0 || c == 0 || r == height - 1 || c == width - 1) {
                s.set_wall({r, c});
            }
        }
    }
    s.player = player;
    s.box = box;
    s.goal = goal;
    return s;
}

bool is_valid(const State& s) {
    if (s.height < 3 || s.width < 3 ||
        s.walls.size() != static_cast<std::size_t>(s.height * s.width)) {
        return false;
    }
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            const bool border = r == 0 || c == 0 || r == s.height - 1 || c == s.width - 1;
            if (border && !s.is_wall({r, c})) {
                return false;
            }
        }
    }
    if (s.is_wall(s.player) || s.is_wall(s.box) || s.is_wall(s.goal)) {
        return false;
    }
    return s.player != s.box;
}

MoveResult apply_move(const State& s, Dir d) {
    MoveResult result{s, false, false};
    const Pos target = step(s.player, d);
    if (s.is_wall(target)) {
        return result;
    }
    if (target == s.box) {
        const Pos beyond = step(s.box, d);
        if (s.is_wall(beyond)) {
            return result;
        }
        result.state.box = beyond;
        result.pushed = true;
    }
    result.state.player = target;
    result.state.steps_taken += 1;
    result.moved = true;
    return result;
}

bool is_solved(const State& s) noexcept { return s.box == s.goal; }

bool is_corner_deadlocked(const State& s) noexcept {
    if (is_solved(s)) {
        return false;
    }
    const bool vertical = s.is_wall(step(s.box, Dir::up)) || s.is_wall(step(s.box, Dir::down));
    const bool horizontal =
        s.is_wall(step(s.box, Dir::left)) || s.is_wall(step(s.box, Dir::right));
    return vertical && horizontal;
}

std::optional<std::vector<Dir>> solve_bfs(const State& s) {
    if (is_solved(s)) {
        return std::vector<Dir>{};
    }
    const int cells = s.height * s.width;
    auto cell = [&](Pos p) { return p.row * s.width + p.col; };
    auto key = [&](Pos player, Pos box) {
        return static_cast<std::size_t>(cell(player) * cells + cell(box));
    };

    struct Node {
        Pos player;
        Pos box;
    };
    constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(static_cast<std::size_t>(cells) * cells, kUnseen);
    std::vector<Dir> via(parent.size(), Dir::up);

    std::deque<Node> frontier;
    const auto start = key(s.player, s.box);
    parent[start] = start;
    frontier.push_back({s.player, s.box});

    State probe = s;
    while (!frontier.empty()) {
        const Node node = frontier.front();
        frontier.pop_front();
        const auto from = key(node.player, node.box);
        probe.player = node.player;
        probe.box = node.box;
        for (Dir d : kAllDirs) {
            const MoveResult moved = apply_move(probe, d);
            if (!moved.moved) {
                continue;
            }
            const auto to = key(moved.state.player, moved.state.box);
            if (parent[to] != kUnseen) {
                continue;
            }
            parent[to] = from;
            via[to] = d;
            if (moved.state.box == s.goal) {
                std::vector<Dir> plan;
                for (auto k = to; k != start; k = parent[k]) {
                    plan.push_back(via[k]);
                }
                std::reverse(plan.begin(), plan.end());
                return plan;
            }
            frontier.push_back({moved.state.player, moved.state.box});
        }
    }
    return std::nullopt;
}

namespace {

void append_mention(std::string& out, std::string_view what, int r, int c) {
    if (!out.empty()) {
        out += ' ';
    }
    out += what;
    out += " at (";
    out += std::to_string(r);
    out += ", ";
    out += std::to_string(c);
    out += ')';
}

}  // namespace

std::string render(const State& s) {
    std::string out;
    out.reserve(static_cast<std::size_t>(s.height * s.width) * 16);
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            const Pos p{r, c};
            if (s.is_wall(p)) {
                append_mention(out, "Wall", r, c);
            } else if (p == s.box) {
                // A box on the goal hides the goal mention.
                append_mention(out, "Box", r, c);
            } else {
                if (p == s.goal) {
                    append_mention(out, "Goal", r, c);
                }
                if (p == s.player) {
                    append_mention(out, "Player", r, c);
                }
            }
        }
    }
    return out;
}

State parse_rendering(std::string_view text, int height, int width) {
    State s = make_bordered(height, width, {1, 1}, {1, 1}, {1, 1});
    std::fill(s.walls.begin(), s.walls.end(), 0);
    std::optional<Pos> player, box, goal;

    auto fail = [](const std::string& why) -> void {
        throw std::invalid_argument("parse_rendering: " + why);
    };
    auto read_int = [&](std::string_view& rest) {
        int value = 0;
        const auto* begin = rest.data();
        const auto* end = rest.data() + rest.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{}) {
            fail("expected integer");
        }
        rest.remove_prefix(static_cast<std::size_t>(ptr - begin));
        return value;
    };
    auto expect = [&](std::string_view& rest, std::string_view token) {
        if (rest.substr(0, token.size()) != token) {
            fail("expected '" + std::string(token) + "'");
        }
        rest.remove_prefix(token.size());
    };

    std::string_view rest = text;
    while (!rest.empty()) {
        const auto space = rest.find(' ');
        const std::string_view word = rest.substr(0, space);
        if (space == std::string_view::npos) {
            fail("truncated mention");
        }
        rest.remove_prefix(space);
        expect(rest, " at (");
        const int r = read_int(rest);
        expect(rest, ", ");
        const int c = read_int(rest);
        expect(rest, ")");
        if (!rest.empty()) {
            expect(rest, " ");
        }
        const Pos p{r, c};
        if (!s.in_bounds(p)) {
            fail("coordinate out of bounds");
        }
        if (word == "Wall") {
            s.set_wall(p);
        } else if (word == "Box" && !box) {
            box = p;
        } else if (word == "Goal" && !goal) {
            goal = p;
        } else if (word == "Player" && !player) {
            player = p;
        } else {
            fail("unexpected mention '" + std::string(word) + "'");
        }
    }
    if (!player || !box) {
        fail("missing player or box");
    }
    s.player = *player;
    s.box = *box;
    s.goal = goal.value_or(*box);
    return s;
}

State generate(std::uint64_t seed, const GenerateOptions& options) {
    if (options.height < 3 || options.width < 3) {
        throw std::invalid_argument("sokoban board must be at least 3x3");
    }
    if (!(options.wall_density >= 0.0 && options.wall_density < 1.0)) {
        throw std::invalid_argument("wall_density must lie in [0, 1)");
    }
    Rng rng(derive_seed(seed, 0x50c0ba4ULL));
    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        State s = make_bordered(options.height, options.width, {1, 1}, {1, 1}, {1, 1});
        std::vector<Pos> free;
        for (int r = 1; r < options.height - 1; ++r) {
            for (int c = 1; c < options.width - 1; ++c) {
                if (rng.bernoulli(options.wall_density)) {
                    s.set_wall({r, c});
                } else {
                    free.push_back({r, c});
                }
            }
        }
        if (free.size() < 3) {
            continue;
        }
        // Partial Fisher-Yates for three distinct cells.
        for (std::size_t i = 0; i < 3; ++i) {
            std::swap(free[i], free[i + rng.below(free.size() - i)]);
        }
        s.player = free[0];
        s.box = free[1];
        s.goal = free[2];
        const auto plan = solve_bfs(s);
        if (!plan || plan->empty()) {
            continue;
        }
        if (options.max_plan_length > 0 &&
            plan->size() > static_cast<std::size_t>(options.max_plan_length)) {
            continue;
        }
        return s;
    }
    throw Error(ErrorCode::GenerationExhausted,
                "no solvable sokoban layout after " + std::to_string(kMaxGenerationAttempts) +
                    " samples");
}

State generate(std::uint64_t seed, int height, int width, double wall_density) {
    return generate(seed, GenerateOptions{height, width, wall_density, 0});
}

std::uint64_t state_hash(const State& s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::int64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<std::uint64_t>(v >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(s.height);
    feed(s.width);
    for (auto w : s.walls) {
        feed(w);
    }
    feed(s.player.row);
    feed(s.player.col);
    feed(s.box.row);
    feed(s.box.col);
    feed(s.goal.row);
    feed(s.goal.col);
    feed(s.steps_taken);
    return h;
}

}  // namespace envforge::sokoban
