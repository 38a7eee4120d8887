#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "envforge/core.hpp"
#include "envforge/environment.hpp"

namespace envforge {

/// Seed of the augmentation stream of one episode. Substream 0 draws the
/// per-trajectory coin, substream t renders the observation at step t.
std::uint64_t augment_key(const AugmentSpec& spec, std::uint64_t env_seed) noexcept;

// One episode: environment, reward contract and trajectory log. Single
// owner; not thread safe.
class Episode {
public:
    /// Generates the environment from `seed`. Throws Error(BadConfig) on an
    /// invalid config or augment spec.
    Episode(EnvId id, std::uint64_t seed, EpisodeConfig config,
            std::optional<AugmentSpec> augment = std::nullopt);

    /// Observation the agent sees before the next step.
    const Observation& observation() const noexcept { return current_; }

    /// Parses, applies and logs one agent response. Throws
    /// Error(SessionTerminated) once the episode is over.
    const StepRecord& step(std::string_view raw_response);

    bool finished() const noexcept { return finished_; }
    bool augmented() const noexcept { return augmented_; }
    const Trajectory& trajectory() const noexcept { return trajectory_; }
    const Environment& env() const noexcept { return *env_; }

private:
    Observation make_observation(int t) const;

    std::unique_ptr<Environment> env_;
    Trajectory trajectory_;
    bool augmented_ = false;
    bool finished_ = false;
    Observation current_;
};

}  // namespace envforge
