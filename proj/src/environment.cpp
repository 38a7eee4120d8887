#include "envforge/environment.hpp"

#include <stdexcept>

#include "envforge/augment.hpp"

namespace envforge {

std::string SokobanEnv::render() const {
    return sokoban::render(state_);
}

std::vector<std::string> SokobanEnv::admissible() const {
    std::vector<std::string> out;
    for (const auto d : sokoban::kAllDirs) {
        out.emplace_back(sokoban::to_string(d));
    }
    return out;
}

std::string SokobanEnv::task() const {
    return "push the box to the target";
}

bool SokobanEnv::apply(std::string_view action) {
    const auto dir = sokoban::dir_from_string(action);
    if (!dir) {
        return false;
    }
    // Blocked moves are accepted no-ops.
    state_ = sokoban::apply_move(state_, *dir).state;
    return true;
}

std::unique_ptr<Environment> SokobanEnv::clone() const {
    return std::make_unique<SokobanEnv>(*this);
}

Observation SokobanEnv::augment(std::string_view rendering, const AugmentSpec& spec,
                                Rng& rng) const {
    return augment::augment_sokoban(state_, rendering, spec, rng);
}

bool HouseEnv::apply(std::string_view action) {
    auto result = house::step(state_, action);
    if (result.accepted) {
        state_ = std::move(result.state);
    }
    return result.accepted;
}

std::unique_ptr<Environment> HouseEnv::clone() const {
    return std::make_unique<HouseEnv>(*this);
}

Observation HouseEnv::augment(std::string_view rendering, const AugmentSpec& spec,
                              Rng& rng) const {
    return augment::augment_alfworld(rendering, house::object_names(state_), spec, rng);
}

bool ShopEnv::apply(std::string_view action) {
    auto result = shop::step(state_, action);
    if (result.accepted) {
        state_ = std::move(result.state);
    }
    return result.accepted;
}

std::unique_ptr<Environment> ShopEnv::clone() const {
    return std::make_unique<ShopEnv>(*this);
}

Observation ShopEnv::augment(std::string_view rendering, const AugmentSpec& spec,
                             Rng& rng) const {
    return augment::augment_webshop(state_.page, rendering, spec, rng);
}

std::unique_ptr<Environment> make_environment(EnvId id, std::uint64_t seed,
                                              const EpisodeConfig& config) {
    switch (id) {
        case EnvId::sokoban: {
            sokoban::GenerateOptions options;
            options.max_plan_length = config.max_steps;
            return std::make_unique<SokobanEnv>(sokoban::generate(seed, options));
        }
        case EnvId::house:
            return std::make_unique<HouseEnv>(house::generate(seed, house::GenerateOptions{}));
        case EnvId::shop: {
            auto catalog = std::make_shared<const shop::Catalog>(
                shop::generate_catalog(seed, kDefaultShopProducts));
            return std::make_unique<ShopEnv>(shop::initial_state(std::move(catalog)));
        }
    }
    throw std::logic_error("unreachable env id");
}

}  // namespace envforge
