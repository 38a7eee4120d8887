#include "envforge/episode.hpp"

#include "envforge/augment.hpp"
#include "envforge/error.hpp"
#include "envforge/rng.hpp"

namespace envforge {

std::uint64_t augment_key(const AugmentSpec& spec, std::uint64_t env_seed) noexcept {
    return derive_seed(spec.seed, env_seed);
}

Episode::Episode(EnvId id, std::uint64_t seed, EpisodeConfig config,
                 std::optional<AugmentSpec> augment) {
    config.validate();
    if (augment) {
        augment->validate();
    }
    env_ = make_environment(id, seed, config);
    trajectory_.env_id = id;
    trajectory_.seed = seed;
    trajectory_.config = config;
    trajectory_.augment = augment;
    if (augment) {
        Rng coin(derive_seed(augment_key(*augment, seed), 0));
        augmented_ = augment::maybe_augment(*augment, coin);
    }
    current_ = make_observation(1);
}

Observation Episode::make_observation(int t) const {
    const std::string base = env_->render();
    Observation obs;
    if (augmented_) {
        Rng rng(derive_seed(augment_key(*trajectory_.augment, trajectory_.seed),
                            static_cast<std::uint64_t>(t)));
        obs = env_->augment(base, *trajectory_.augment, rng);
    } else {
        obs.text = base;
    }
    obs.admissible_actions = env_->admissible();
    obs.task = env_->task();
    return obs;
}

const StepRecord& Episode::step(std::string_view raw_response) {
    if (finished_) {
        throw Error(ErrorCode::SessionTerminated, "episode already finished");
    }
    const EpisodeConfig& cfg = trajectory_.config;
    StepRecord rec;
    rec.t = static_cast<int>(trajectory_.steps.size()) + 1;
    rec.observation = std::move(current_);
    rec.raw_response = std::string(raw_response);

    const ParseResult parsed = parse_agent_response(raw_response, cfg.thinking_required);
    bool accepted = false;
    if (const auto* ok = std::get_if<ParsedResponse>(&parsed)) {
        rec.parsed_action = ok->action;
        accepted = env_->apply(ok->action);
    }

    if (!accepted) {
        rec.invalid = true;
        rec.reward = cfg.invalid_penalty;
    } else if (env_->terminal()) {
        rec.done = true;
        rec.reward = env_->succeeded() ? cfg.success_reward : cfg.failure_reward;
        trajectory_.success = env_->succeeded();
    } else {
        rec.reward = 0.0;
    }
    if (!rec.done && rec.t >= cfg.max_steps) {
        rec.truncated = true;
    }
    finished_ = rec.done || rec.truncated;

    trajectory_.total_reward += rec.reward;
    trajectory_.steps.push_back(std::move(rec));
    current_ = make_observation(trajectory_.steps.back().t + 1);
    return trajectory_.steps.back();
}

}  // namespace envforge
