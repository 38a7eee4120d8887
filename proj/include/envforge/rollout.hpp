#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "envforge/core.hpp"
#include "envforge/episode.hpp"

namespace envforge::rollout {

enum class PolicyKind {
    sokoban_bfs,       // plans on the ground-truth board
    sokoban_bfs_text,  // plans on the board parsed back from the observation text
    sokoban_random,
    house_greedy,
    shop_greedy,
    uniform_random,  // uniform over the admissible list
    remote,          // served over the protocol; cannot run in-process
};

std::string_view to_string(PolicyKind kind) noexcept;
/// Throws Error(BadConfig) for unknown names.
PolicyKind policy_kind_from_string(std::string_view name);

struct PolicySpec {
    PolicyKind kind = PolicyKind::uniform_random;
    bool emits_thinking = true;
};

class Policy {
public:
    virtual ~Policy() = default;
    /// Raw agent response for the episode's current observation. Throws
    /// Error(PolicyFailure) when no action can be produced.
    virtual std::string respond(const Episode& episode) = 0;
};

/// `seed` feeds the random policies only.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::uint64_t seed);

/// "<think>...</think><action>a</action>" or "<action>a</action>".
std::string format_response(std::string_view action, std::string_view thinking, bool emits_thinking);

/// Picks one admissible action; templates like "search[<query>]" are filled
/// with the task text.
std::string pick_admissible(const Observation& obs, Rng& rng);

/// Sokoban board recovered from the first line of an observation; extra
/// lines (distractors) are ignored.
sokoban::State parse_sokoban_observation(std::string_view text);

Trajectory run_episode(EnvId env, std::uint64_t seed, const EpisodeConfig& config,
                       const std::optional<AugmentSpec>& augment, const PolicySpec& policy);

/// Seed of episode k in a suite: mix64(suite_seed + k).
std::uint64_t episode_seed(std::uint64_t suite_seed, std::uint64_t k) noexcept;

struct SuiteOptions {
    EnvId env = EnvId::sokoban;
    int n_episodes = 1;
    std::uint64_t suite_seed = 0;
    std::optional<EpisodeConfig> config;  // default_config(env) when absent
    std::optional<AugmentSpec> augment;
    PolicySpec policy;
    int threads = 0;  // 0 = hardware concurrency
};

struct SuiteSummary {
    double success_rate = 0.0;
    double avg_char_count = 0.0;
    double avg_traj_length = 0.0;
};

struct SuiteResult {
    std::vector<Trajectory> trajectories;  // in episode order
    SuiteSummary summary;
};

/// Runs the episodes on a worker pool. Results do not depend on the number
/// of threads or on scheduling.
SuiteResult run_suite(const SuiteOptions& options);

}  // namespace envforge::rollout
