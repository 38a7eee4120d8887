#include "envforge/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>

#include "envforge/error.hpp"
#include "envforge/metrics.hpp"

namespace envforge::rollout {

namespace {

constexpr std::uint64_t kPolicyStreamTag = 0x90110c7;

std::string plan_next(const sokoban::State& board) {
    const auto plan = sokoban::solve_bfs(board);
    if (!plan || plan->empty()) {
        throw Error(ErrorCode::PolicyFailure, "no plan from the current board");
    }
    return std::string(sokoban::to_string(plan->front()));
}

class SokobanBfsPolicy final : public Policy {
public:
    SokobanBfsPolicy(bool from_text, bool thinking) : from_text_(from_text), thinking_(thinking) {}

    std::string respond(const Episode& episode) override {
        std::string action;
        if (from_text_) {
            action = plan_next(parse_sokoban_observation(episode.observation().text));
        } else {
            const auto* env = dynamic_cast<const SokobanEnv*>(&episode.env());
            if (!env) {
                throw Error(ErrorCode::PolicyFailure, "sokoban policy on a non-sokoban env");
            }
            action = plan_next(env->state());
        }
        return format_response(action, "follow the shortest push plan", thinking_);
    }

private:
    bool from_text_;
    bool thinking_;
};

class SokobanRandomPolicy final : public Policy {
public:
    SokobanRandomPolicy(std::uint64_t seed, bool thinking) : rng_(seed), thinking_(thinking) {}

    std::string respond(const Episode&) override {
        const auto d = sokoban::kAllDirs[rng_.below(4)];
        return format_response(sokoban::to_string(d), "pick a direction", thinking_);
    }

private:
    Rng rng_;
    bool thinking_;
};

class HouseGreedyPolicy final : public Policy {
public:
    explicit HouseGreedyPolicy(bool thinking) : thinking_(thinking) {}

    std::string respond(const Episode& episode) override {
        const auto* env = dynamic_cast<const HouseEnv*>(&episode.env());
        if (!env) {
            throw Error(ErrorCode::PolicyFailure, "house policy on a non-house env");
        }
        const auto action = house::greedy_action(env->state());
        if (!action) {
            throw Error(ErrorCode::PolicyFailure, "task already complete");
        }
        return format_response(*action, "move the next task object", thinking_);
    }

private:
    bool thinking_;
};

class ShopGreedyPolicy final : public Policy {
public:
    explicit ShopGreedyPolicy(bool thinking) : thinking_(thinking) {}

    std::string respond(const Episode& episode) override {
        const auto* env = dynamic_cast<const ShopEnv*>(&episode.env());
        if (!env) {
            throw Error(ErrorCode::PolicyFailure, "shop policy on a non-shop env");
        }
        const auto action = shop::greedy_action(env->state());
        if (!action) {
            throw Error(ErrorCode::PolicyFailure, "purchase already made");
        }
        return format_response(*action, "head for the matching product", thinking_);
    }

private:
    bool thinking_;
};

class UniformRandomPolicy final : public Policy {
public:
    UniformRandomPolicy(std::uint64_t seed, bool thinking) : rng_(seed), thinking_(thinking) {}

    std::string respond(const Episode& episode) override {
        return format_response(pick_admissible(episode.observation(), rng_), "try something",
                               thinking_);
    }

private:
    Rng rng_;
    bool thinking_;
};

class RemotePolicy final : public Policy {
public:
    std::string respond(const Episode&) override {
        throw Error(ErrorCode::PolicyFailure,
                    "remote policies drive sessions through the protocol server");
    }
};

}  // namespace

std::string_view to_string(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::sokoban_bfs: return "sokoban_bfs";
        case PolicyKind::sokoban_bfs_text: return "sokoban_bfs_text";
        case PolicyKind::sokoban_random: return "sokoban_random";
        case PolicyKind::house_greedy: return "house_greedy";
        case PolicyKind::shop_greedy: return "shop_greedy";
        case PolicyKind::uniform_random: return "uniform_random";
        case PolicyKind::remote: return "remote";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(std::string_view name) {
    for (const auto kind : {PolicyKind::sokoban_bfs, PolicyKind::sokoban_bfs_text,
                            PolicyKind::sokoban_random, PolicyKind::house_greedy,
                            PolicyKind::shop_greedy, PolicyKind::uniform_random,
                            PolicyKind::remote}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw Error(ErrorCode::BadConfig, "unknown policy '" + std::string(name) + "'");
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::uint64_t seed) {
    const bool think = spec.emits_thinking;
    switch (spec.kind) {
        case PolicyKind::sokoban_bfs: return std::make_unique<SokobanBfsPolicy>(false, think);
        case PolicyKind::sokoban_bfs_text: return std::make_unique<SokobanBfsPolicy>(true, think);
        case PolicyKind::sokoban_random: return std::make_unique<SokobanRandomPolicy>(seed, think);
        case PolicyKind::house_greedy: return std::make_unique<HouseGreedyPolicy>(think);
        case PolicyKind::shop_greedy: return std::make_unique<ShopGreedyPolicy>(think);
        case PolicyKind::uniform_random: return std::make_unique<UniformRandomPolicy>(seed, think);
        case PolicyKind::remote: return std::make_unique<RemotePolicy>();
    }
    throw Error(ErrorCode::BadConfig, "unknown policy kind");
}

std::string format_response(std::string_view action, std::string_view thinking, bool emits_thinking) {
    std::string out;
    if (emits_thinking) {
        out += "<think>" + std::string(thinking) + "</think>";
    }
    out += "<action>" + std::string(action) + "</action>";
    return out;
}

std::string pick_admissible(const Observation& obs, Rng& rng) {
    if (obs.admissible_actions.empty()) {
        throw Error(ErrorCode::PolicyFailure, "no admissible actions");
    }
    std::string action = obs.admissible_actions[rng.below(obs.admissible_actions.size())];
    constexpr std::string_view kSlot = "<query>";
    if (const auto pos = action.find(kSlot); pos != std::string::npos) {
        action.replace(pos, kSlot.size(), obs.task);
    }
    return action;
}

sokoban::State parse_sokoban_observation(std::string_view text) {
    const std::string_view board = text.substr(0, text.find('\n'));
    int max_row = -1;
    int max_col = -1;
    for (auto pos = board.find('('); pos != std::string_view::npos; pos = board.find('(', pos + 1)) {
        int r = 0;
        int c = 0;
        const char* p = board.data() + pos + 1;
        const char* end = board.data() + board.size();
        auto res = std::from_chars(p, end, r);
        if (res.ec != std::errc{} || end - res.ptr < 2 || res.ptr[0] != ',' || res.ptr[1] != ' ') {
            throw Error(ErrorCode::PolicyFailure, "unreadable coordinate in observation");
        }
        res = std::from_chars(res.ptr + 2, end, c);
        if (res.ec != std::errc{}) {
            throw Error(ErrorCode::PolicyFailure, "unreadable coordinate in observation");
        }
        max_row = std::max(max_row, r);
        max_col = std::max(max_col, c);
    }
    if (max_row < 0 || max_col < 0) {
        throw Error(ErrorCode::PolicyFailure, "observation lists no cells");
    }
    try {
        return sokoban::parse_rendering(board, max_row + 1, max_col + 1);
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::PolicyFailure, e.what());
    }
}

Trajectory run_episode(EnvId env, std::uint64_t seed, const EpisodeConfig& config,
                       const std::optional<AugmentSpec>& augment, const PolicySpec& policy_spec) {
    Episode episode(env, seed, config, augment);
    auto policy = make_policy(policy_spec, derive_seed(seed, kPolicyStreamTag));
    while (!episode.finished()) {
        episode.step(policy->respond(episode));
    }
    return episode.trajectory();
}

std::uint64_t episode_seed(std::uint64_t suite_seed, std::uint64_t k) noexcept {
    return mix64(suite_seed + k);
}

SuiteResult run_suite(const SuiteOptions& options) {
    if (options.n_episodes < 1) {
        throw Error(ErrorCode::BadConfig, "n_episodes must be >= 1");
    }
    const EpisodeConfig config = options.config.value_or(default_config(options.env));
    const auto n = static_cast<std::size_t>(options.n_episodes);

    SuiteResult result;
    result.trajectories.resize(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n) {
                return;
            }
            try {
                result.trajectories[k] = run_episode(options.env, episode_seed(options.suite_seed, k),
                                                     config, options.augment, options.policy);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };

    std::size_t threads = options.threads > 0 ? static_cast<std::size_t>(options.threads)
                                              : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    result.summary.success_rate = metrics::success_rate(result.trajectories);
    result.summary.avg_char_count = metrics::avg_char_count(result.trajectories);
    result.summary.avg_traj_length = metrics::avg_traj_length(result.trajectories, config.max_steps);
    return result;
}

}  // namespace envforge::rollout
