#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "envforge/core.hpp"

// One JSON object per trajectory per line:
// {env, seed, config, augment, success, total_reward,
//  steps:[{t, obs, action_raw, action, invalid, reward, done, truncated, injected_spans}]}
namespace envforge {

nlohmann::ordered_json config_to_json(const EpisodeConfig& cfg);
EpisodeConfig config_from_json(const nlohmann::json& j);

nlohmann::ordered_json augment_to_json(const AugmentSpec& spec);
AugmentSpec augment_from_json(const nlohmann::json& j);

nlohmann::ordered_json trajectory_to_json(const Trajectory& traj);
/// Throws Error(BadRequest) on a malformed record.
Trajectory trajectory_from_json(const nlohmann::json& j);

/// Single line, no trailing newline.
std::string trajectory_to_line(const Trajectory& traj);

void write_jsonl(std::ostream& out, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_jsonl(std::istream& in);

}  // namespace envforge
