#include "envforge/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "envforge/house.hpp"

namespace envforge::augment {

namespace {

// Guards floor() against representation error, e.g. 0.3 * 1000 = 299.99...
int floor_count(double x) {
    return static_cast<int>(std::floor(x + 1e-9));
}

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& items) {
    return items[rng.below(N)];
}

std::string sq(std::string_view s) {
    return "'" + std::string(s) + "'";
}

constexpr std::string_view kSep = " [SEP] ";

// One insertion: `text` goes in front of original byte offset `at`.
struct Insert {
    std::size_t at;
    std::string text;
};

// Applies inserts (stable by offset), one span per insert.
Observation splice(std::string_view original, std::vector<Insert> inserts) {
    std::stable_sort(inserts.begin(), inserts.end(),
                     [](const Insert& a, const Insert& b) { return a.at < b.at; });
    Observation obs;
    std::size_t cursor = 0;
    for (const auto& ins : inserts) {
        obs.text.append(original.substr(cursor, ins.at - cursor));
        cursor = ins.at;
        const std::size_t start = obs.text.size();
        obs.text += ins.text;
        obs.injected_spans.push_back({start, obs.text.size()});
    }
    obs.text.append(original.substr(cursor));
    return obs;
}

std::string fake_asin(Rng& rng) {
    static constexpr std::string_view kAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    std::string asin(vocab::kFakeAsinPrefix);
    while (asin.size() < 10) {
        asin += kAlphabet[rng.below(kAlphabet.size())];
    }
    return asin;
}

std::string ad_line(Rng& rng) {
    const auto promo = pick(rng, vocab::kWebPromos);
    const auto category = pick(rng, vocab::kWebCategories);
    return fill(vocab::kWebAdTemplate, {{"promo", promo}, {"category", category}});
}

// Ends of the " [SEP] "-separated segments.
std::vector<std::size_t> segment_ends(std::string_view text) {
    std::vector<std::size_t> ends;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(kSep, pos);
        if (next == std::string_view::npos) {
            ends.push_back(text.size());
            return ends;
        }
        ends.push_back(next);
        pos = next + kSep.size();
    }
}

}  // namespace

std::string fill(std::string_view templ,
                 std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
    std::string out(templ);
    for (const auto& [key, value] : values) {
        const std::string placeholder = "{" + std::string(key) + "}";
        for (auto pos = out.find(placeholder); pos != std::string::npos;
             pos = out.find(placeholder, pos + value.size())) {
            out.replace(pos, placeholder.size(), value);
        }
    }
    return out;
}

int alf_sentence_count(double epsilon) {
    return floor_count(epsilon / 12.0);
}

int web_result_count(double epsilon, double alpha) {
    return std::min(floor_count(epsilon / 100.0 * alpha * 10.0), 10);
}

int web_feature_count(double epsilon) {
    return std::max(1, floor_count(epsilon / 25.0));
}

int web_ad_count(double epsilon) {
    return std::max(1, floor_count(epsilon / 30.0));
}

int sokoban_line_count(double epsilon) {
    return std::max(1, floor_count(epsilon / 10.0));
}

bool maybe_augment(const AugmentSpec& spec, Rng& rng) {
    return rng.bernoulli(spec.prob);
}

Observation augment_alfworld(std::string_view obs_text,
                             const std::vector<std::string>& scene_object_names,
                             const AugmentSpec& spec, Rng& rng) {
    // Scene paragraph: between the first and the last blank line.
    std::size_t body_begin = 0;
    std::size_t body_end = obs_text.size();
    const auto first = obs_text.find("\n\n");
    const auto last = obs_text.rfind("\n\n");
    if (first != std::string_view::npos && last > first) {
        body_begin = first + 2;
        body_end = last;
    }

    std::vector<std::size_t> starts{body_begin};
    for (std::size_t p = body_begin + 2; p < body_end; ++p) {
        if (obs_text[p - 2] == '.' && obs_text[p - 1] == ' ') {
            starts.push_back(p);
        }
    }

    std::map<std::string, std::set<int>> used_ids;
    for (const auto& name : scene_object_names) {
        if (const auto parts = house::split_name(name)) {
            used_ids[parts->first].insert(parts->second);
        }
    }

    const int n = alf_sentence_count(spec.epsilon);
    std::vector<Insert> inserts;
    inserts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::string type(pick(rng, vocab::kAlfObjectTypes));
        const auto desc = pick(rng, vocab::kAlfDescriptors);
        const auto templ = pick(rng, vocab::kAlfTemplates);
        auto& ids = used_ids[type];
        int id = 1;
        while (ids.count(id)) {
            ++id;
        }
        ids.insert(id);
        const std::string name = type + " " + std::to_string(id);
        const std::string sentence = fill(templ, {{"obj", name}, {"desc", desc}});

        // Boundary k < starts.size() is a sentence start; the extra slot is
        // the end of the paragraph.
        const auto k = rng.below(starts.size() + 1);
        if (k < starts.size()) {
            inserts.push_back({starts[k], sentence + " "});
        } else {
            inserts.push_back({body_end, " " + sentence});
        }
    }
    return splice(obs_text, std::move(inserts));
}

Observation augment_webshop(const shop::Page& page, std::string_view rendering,
                            const AugmentSpec& spec, Rng& rng) {
    if (page.kind == shop::PageKind::search) {
        return Observation{std::string(rendering), {}, {}, {}};
    }
    const auto ends = segment_ends(rendering);
    std::vector<Insert> inserts;

    if (page.kind == shop::PageKind::results) {
        const std::size_t items = page.visible_asins.size();
        if (ends.size() < 3 * items + 1) {
            throw std::invalid_argument("rendering does not match results page");
        }
        const std::size_t header = ends.size() - 3 * items;
        std::vector<std::size_t> slots{ends[header - 1]};
        for (std::size_t i = 0; i < items; ++i) {
            slots.push_back(ends[header + 3 * i + 2]);
        }
        const int k = web_result_count(spec.epsilon, spec.alpha);
        for (int i = 0; i < k; ++i) {
            const std::size_t at = slots[rng.below(slots.size())];
            std::string entry;
            if (rng.bernoulli(0.5)) {
                entry = std::string(kSep) + sq(ad_line(rng));
            } else {
                const auto desc = pick(rng, vocab::kWebNontargetFeatures);
                const auto obj = pick(rng, vocab::kWebTrivialProductTypes);
                const auto templ = pick(rng, vocab::kWebTrivialProductTemplates);
                entry = std::string(kSep) + sq(fake_asin(rng)) + std::string(kSep) +
                        sq(fill(templ, {{"desc", desc}, {"obj", obj}}));
            }
            inserts.push_back({at, std::move(entry)});
        }
    } else {
        const auto anchor = rendering.rfind("'Reviews'");
        if (anchor == std::string_view::npos) {
            throw std::invalid_argument("rendering does not match detail page");
        }
        const std::size_t at = anchor + std::string_view("'Reviews'").size();
        for (int i = 0; i < web_feature_count(spec.epsilon); ++i) {
            inserts.push_back({at, std::string(kSep) + sq(pick(rng, vocab::kWebTrivialFeatures))});
        }
        for (int i = 0; i < web_ad_count(spec.epsilon); ++i) {
            inserts.push_back({at, std::string(kSep) + sq(ad_line(rng))});
        }
    }
    return splice(rendering, std::move(inserts));
}

Observation augment_sokoban(const sokoban::State& state, std::string_view rendering,
                            const AugmentSpec& spec, Rng& rng) {
    const int n = sokoban_line_count(spec.epsilon);
    // Sample from a frame of width `margin` around the grid; widen it until
    // the frame holds at least twice the requested number of cells.
    int margin = 3;
    auto frame_cells = [&](int m) {
        return (state.height + 2 * m) * (state.width + 2 * m) - state.height * state.width;
    };
    while (frame_cells(margin) < 2 * n) {
        ++margin;
    }

    std::set<sokoban::Pos> taken;
    std::vector<Insert> inserts;
    while (static_cast<int>(taken.size()) < n) {
        const sokoban::Pos p{static_cast<int>(rng.between(-margin, state.height - 1 + margin)),
                             static_cast<int>(rng.between(-margin, state.width - 1 + margin))};
        if (state.in_bounds(p) || !taken.insert(p).second) {
            continue;
        }
        const std::string row = std::to_string(p.row);
        const std::string col = std::to_string(p.col);
        inserts.push_back({rendering.size(), "\n" + fill(vocab::kSokobanTemplate, {{"row", row},
                                                       {"col", col},
                                                       {"obj", pick(rng, vocab::kSokobanObjects)},
                                                       {"desc", pick(rng, vocab::kSokobanLocations)}})});
    }
    return splice(rendering, std::move(inserts));
}

}  // namespace envforge::augment
