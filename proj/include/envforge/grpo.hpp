#pragma once

#include <vector>

#include <json.hpp>

// Group-relative advantages and the clipped surrogate objective, evaluated
// on logged returns and per-action log-probabilities.
namespace envforge::grpo {

struct GrpoConfig {
    double clip_range = 0.2;
    double kl_coeff = 0.01;
    double std_floor = 1e-8;
};

struct GroupBatch {
    std::vector<double> returns;                    // R(tau_i), one per trajectory
    std::vector<std::vector<double>> logp_current;  // [trajectory][action]
    std::vector<std::vector<double>> logp_old;
    std::vector<std::vector<double>> logp_ref;
};

/// (R_i - mean) / population std; all zeros when std < std_floor.
/// Throws Error(GroupTooSmall) for fewer than two returns.
std::vector<double> group_advantages(const std::vector<double>& returns, double std_floor = 1e-8);

/// exp(current - old) per action. Throws Error(LengthMismatch).
std::vector<double> importance_ratios(const std::vector<double>& logp_current,
                                      const std::vector<double>& logp_old);

/// min(rho * A, clamp(rho, 1 - c, 1 + c) * A)
double clipped_term(double ratio, double advantage, double clip_range);

/// exp(ref - cur) - (ref - cur) - 1, always >= 0.
double kl_estimate(double logp_current, double logp_ref);

struct SurrogateResult {
    std::vector<double> advantages;
    std::vector<std::vector<double>> per_action_terms;
    double kl = 0.0;         // mean of kl_estimate over all actions
    double objective = 0.0;  // mean over trajectories of their mean term, minus kl_coeff * kl
};

/// Throws Error(LengthMismatch) when the log-prob lists do not align and
/// Error(BadConfig) for clip_range <= 0.
SurrogateResult clipped_surrogate(const GroupBatch& batch, const GrpoConfig& cfg);

/// Reads {returns, logp_current, logp_old, logp_ref, clip_range, beta}.
std::pair<GroupBatch, GrpoConfig> batch_from_json(const nlohmann::json& j);

nlohmann::ordered_json result_to_json(const SurrogateResult& result);

}  // namespace envforge::grpo
