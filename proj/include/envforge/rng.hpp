#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace envforge {

/// SplitMix64 finalizer. Used for every seed derivation in the project.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent substream seed from a parent seed and a tag.
/// derive_seed(s, a) != derive_seed(s, b) for a != b with overwhelming
/// probability; the function is pure and platform independent.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept;

// Thin wrapper over mt19937_64. The engine's output sequence is fixed by the
// standard; the sampling helpers below are implemented here rather than with
// <random> distributions, whose algorithms vary between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi);

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    const T& pick(std::span<const T> items) {
        return items[below(items.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace envforge
