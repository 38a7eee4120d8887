#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "envforge/augment_spec.hpp"
#include "envforge/core.hpp"
#include "envforge/house.hpp"
#include "envforge/rng.hpp"
#include "envforge/shop.hpp"
#include "envforge/sokoban.hpp"

namespace envforge {

// Uniform face of the three simulators. Owns the ground-truth state;
// observations are derived from it and never feed back into it.
class Environment {
public:
    virtual ~Environment() = default;

    virtual EnvId id() const noexcept = 0;
    virtual std::string render() const = 0;
    virtual std::vector<std::string> admissible() const = 0;
    virtual std::string task() const = 0;

    /// Applies an action; false when the simulator rejects it (state unchanged).
    virtual bool apply(std::string_view action) = 0;

    /// Episode over: solved, task complete or purchase made.
    virtual bool terminal() const = 0;
    /// Terminal with the goal met.
    virtual bool succeeded() const = 0;

    virtual std::uint64_t state_hash() const = 0;
    virtual std::unique_ptr<Environment> clone() const = 0;

    /// Distractor-injected copy of `rendering` (text and spans only).
    virtual Observation augment(std::string_view rendering, const AugmentSpec& spec,
                                Rng& rng) const = 0;
};

inline constexpr int kDefaultShopProducts = 50;

class SokobanEnv final : public Environment {
public:
    explicit SokobanEnv(sokoban::State state) : state_(std::move(state)) {}

    EnvId id() const noexcept override { return EnvId::sokoban; }
    std::string render() const override;
    std::vector<std::string> admissible() const override;
    std::string task() const override;
    bool apply(std::string_view action) override;
    bool terminal() const override { return sokoban::is_solved(state_); }
    bool succeeded() const override { return terminal(); }
    std::uint64_t state_hash() const override { return sokoban::state_hash(state_); }
    std::unique_ptr<Environment> clone() const override;
    Observation augment(std::string_view rendering, const AugmentSpec& spec,
                        Rng& rng) const override;

    const sokoban::State& state() const noexcept { return state_; }

private:
    sokoban::State state_;
};

class HouseEnv final : public Environment {
public:
    explicit HouseEnv(house::State state) : state_(std::move(state)) {}

    EnvId id() const noexcept override { return EnvId::house; }
    std::string render() const override { return house::render(state_); }
    std::vector<std::string> admissible() const override { return house::admissible(state_); }
    std::string task() const override { return house::task_description(state_.task); }
    bool apply(std::string_view action) override;
    bool terminal() const override { return house::task_complete(state_); }
    bool succeeded() const override { return terminal(); }
    std::uint64_t state_hash() const override { return house::state_hash(state_); }
    std::unique_ptr<Environment> clone() const override;
    Observation augment(std::string_view rendering, const AugmentSpec& spec,
                        Rng& rng) const override;

    const house::State& state() const noexcept { return state_; }

private:
    house::State state_;
};

class ShopEnv final : public Environment {
public:
    explicit ShopEnv(shop::State state) : state_(std::move(state)) {}

    EnvId id() const noexcept override { return EnvId::shop; }
    std::string render() const override { return shop::render(state_); }
    std::vector<std::string> admissible() const override { return shop::admissible(state_); }
    std::string task() const override { return shop::goal_instruction(state_.catalog->goal); }
    bool apply(std::string_view action) override;
    bool terminal() const override { return state_.purchase.has_value(); }
    bool succeeded() const override { return state_.purchase && state_.purchase->success; }
    std::uint64_t state_hash() const override { return shop::state_hash(state_); }
    std::unique_ptr<Environment> clone() const override;
    Observation augment(std::string_view rendering, const AugmentSpec& spec,
                        Rng& rng) const override;

    const shop::State& state() const noexcept { return state_; }

private:
    shop::State state_;
};

/// Generates the seeded instance for an environment. Sokoban boards are
/// limited to optimal plans that fit the step budget.
std::unique_ptr<Environment> make_environment(EnvId id, std::uint64_t seed,
                                              const EpisodeConfig& config);

}  // namespace envforge
