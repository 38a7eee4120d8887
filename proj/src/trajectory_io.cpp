#include "envforge/trajectory_io.hpp"

#include <istream>
#include <ostream>

#include "envforge/error.hpp"

namespace envforge {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json config_to_json(const EpisodeConfig& cfg) {
    ordered_json j;
    j["max_steps"] = cfg.max_steps;
    j["success_reward"] = cfg.success_reward;
    j["failure_reward"] = cfg.failure_reward;
    j["invalid_penalty"] = cfg.invalid_penalty;
    j["thinking_required"] = cfg.thinking_required;
    return j;
}

EpisodeConfig config_from_json(const json& j) {
    EpisodeConfig cfg;
    cfg.max_steps = j.at("max_steps").get<int>();
    cfg.success_reward = j.at("success_reward").get<double>();
    cfg.failure_reward = j.at("failure_reward").get<double>();
    cfg.invalid_penalty = j.at("invalid_penalty").get<double>();
    cfg.thinking_required = j.at("thinking_required").get<bool>();
    return cfg;
}

ordered_json augment_to_json(const AugmentSpec& spec) {
    ordered_json j;
    j["epsilon"] = spec.epsilon;
    j["prob"] = spec.prob;
    j["alpha"] = spec.alpha;
    j["seed"] = spec.seed;
    return j;
}

AugmentSpec augment_from_json(const json& j) {
    AugmentSpec spec;
    spec.epsilon = j.value("epsilon", spec.epsilon);
    spec.prob = j.value("prob", spec.prob);
    spec.alpha = j.value("alpha", spec.alpha);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

ordered_json trajectory_to_json(const Trajectory& traj) {
    ordered_json j;
    j["env"] = std::string(to_string(traj.env_id));
    j["seed"] = traj.seed;
    j["config"] = config_to_json(traj.config);
    j["augment"] = traj.augment ? augment_to_json(*traj.augment) : ordered_json(nullptr);
    j["success"] = traj.success;
    j["total_reward"] = traj.total_reward;
    ordered_json steps = ordered_json::array();
    for (const auto& s : traj.steps) {
        ordered_json step;
        step["t"] = s.t;
        step["obs"] = s.observation.text;
        step["action_raw"] = s.raw_response;
        step["action"] = s.parsed_action ? ordered_json(*s.parsed_action) : ordered_json(nullptr);
        step["invalid"] = s.invalid;
        step["reward"] = s.reward;
        step["done"] = s.done;
        step["truncated"] = s.truncated;
        ordered_json spans = ordered_json::array();
        for (const auto& span : s.observation.injected_spans) {
            spans.push_back({span.start, span.end});
        }
        step["injected_spans"] = std::move(spans);
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    return j;
}

Trajectory trajectory_from_json(const json& j) {
    try {
        Trajectory traj;
        traj.env_id = env_id_from_string(j.at("env").get<std::string>());
        traj.seed = j.at("seed").get<std::uint64_t>();
        traj.config = config_from_json(j.at("config"));
        if (!j.at("augment").is_null()) {
            traj.augment = augment_from_json(j.at("augment"));
        }
        traj.success = j.at("success").get<bool>();
        traj.total_reward = j.at("total_reward").get<double>();
        for (const auto& s : j.at("steps")) {
            StepRecord rec;
            rec.t = s.at("t").get<int>();
            rec.observation.text = s.at("obs").get<std::string>();
            rec.raw_response = s.at("action_raw").get<std::string>();
            if (!s.at("action").is_null()) {
                rec.parsed_action = s.at("action").get<std::string>();
            }
            rec.invalid = s.at("invalid").get<bool>();
            rec.reward = s.at("reward").get<double>();
            rec.done = s.at("done").get<bool>();
            rec.truncated = s.at("truncated").get<bool>();
            for (const auto& span : s.at("injected_spans")) {
                rec.observation.injected_spans.push_back(
                    {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()});
            }
            traj.steps.push_back(std::move(rec));
        }
        return traj;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadRequest, std::string("malformed trajectory: ") + e.what());
    }
}

std::string trajectory_to_line(const Trajectory& traj) {
    return trajectory_to_json(traj).dump();
}

void write_jsonl(std::ostream& out, const std::vector<Trajectory>& trajectories) {
    for (const auto& t : trajectories) {
        out << trajectory_to_line(t) << '\n';
    }
}

std::vector<Trajectory> read_jsonl(std::istream& in) {
    std::vector<Trajectory> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::BadRequest, std::string("invalid JSON line: ") + e.what());
        }
        out.push_back(trajectory_from_json(j));
    }
    return out;
}

}  // namespace envforge
