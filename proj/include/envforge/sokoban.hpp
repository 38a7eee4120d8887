#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace envforge::sokoban {

struct Pos {
    int row = 0;
    int col = 0;

    bool operator==(const Pos&) const = default;
    auto operator<=>(const Pos&) const = default;
};

enum class Dir { up, down, left, right };

/// Fixed tie-break order for search: up < down < left < right.
inline constexpr Dir kAllDirs[] = {Dir::up, Dir::down, Dir::left, Dir::right};

std::string_view to_string(Dir d) noexcept;
std::optional<Dir> dir_from_string(std::string_view s) noexcept;
Pos step(Pos p, Dir d) noexcept;

/// Single-box Sokoban board. (0, 0) is the top-left corner; rows grow down.
struct State {
    int height = 6;
    int width = 6;
    std::vector<std::uint8_t> walls;  // row-major, 1 = wall
    Pos player;
    Pos box;
    Pos goal;
    int steps_taken = 0;

    bool in_bounds(Pos p) const noexcept {
        return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width;
    }
    bool is_wall(Pos p) const noexcept {
        return !in_bounds(p) || walls[static_cast<std::size_t>(p.row * width + p.col)] != 0;
    }
    void set_wall(Pos p, bool wall = true) {
        walls[static_cast<std::size_t>(p.row * width + p.col)] = wall ? 1 : 0;
    }

    bool operator==(const State&) const = default;
};

/// Board with border walls only and the entities at the given cells.
State make_bordered(int height, int width, Pos player, Pos box, Pos goal);

/// Checks the structural invariants (border walls, entities on free cells,
/// box distinct from player and goal placement legal).
bool is_valid(const State& s);

struct MoveResult {
    State state;
    bool moved = false;
    bool pushed = false;
};

MoveResult apply_move(const State& s, Dir d);

bool is_solved(const State& s) noexcept;
bool is_corner_deadlocked(const State& s) noexcept;

/// Shortest push/move plan that brings the box onto the goal; empty when the
/// input is already solved, nullopt when unsolvable.
std::optional<std::vector<Dir>> solve_bfs(const State& s);

/// Coordinate-list rendering, one mention per cell in row-major order.
std::string render(const State& s);

/// Inverse of render for a board of known size. Throws std::invalid_argument
/// on text that is not a rendering.
State parse_rendering(std::string_view text, int height, int width);

struct GenerateOptions {
    int height = 6;
    int width = 6;
    double wall_density = 0.1;
    /// Reject layouts whose optimal plan is longer than this (0 = no cap).
    int max_plan_length = 0;
};

/// Rejection-samples a solvable board. Throws Error(GenerationExhausted)
/// after 10,000 rejected samples.
State generate(std::uint64_t seed, const GenerateOptions& options);
State generate(std::uint64_t seed, int height, int width, double wall_density);

inline constexpr int kMaxGenerationAttempts = 10'000;

/// Stable 64-bit digest of the full state (FNV-1a over a canonical encoding).
std::uint64_t state_hash(const State& s) noexcept;

}  // namespace envforge::sokoban
