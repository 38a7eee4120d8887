#include "envforge/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "envforge/error.hpp"

namespace envforge::grpo {

std::vector<double> group_advantages(const std::vector<double>& returns, double std_floor) {
    const std::size_t n = returns.size();
    if (n < 2) {
        throw Error(ErrorCode::GroupTooSmall, "group needs at least two returns");
    }
    double mean = 0.0;
    for (const double r : returns) {
        mean += r;
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const double r : returns) {
        var += (r - mean) * (r - mean);
    }
    const double sd = std::sqrt(var / static_cast<double>(n));

    std::vector<double> adv(n, 0.0);
    if (sd < std_floor) {
        return adv;
    }
    for (std::size_t i = 0; i < n; ++i) {
        adv[i] = (returns[i] - mean) / sd;
    }
    return adv;
}

std::vector<double> importance_ratios(const std::vector<double>& logp_current,
                                      const std::vector<double>& logp_old) {
    if (logp_current.size() != logp_old.size()) {
        throw Error(ErrorCode::LengthMismatch, "current and old log-probs differ in length");
    }
    std::vector<double> out(logp_current.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp(logp_current[i] - logp_old[i]);
    }
    return out;
}

double clipped_term(double ratio, double advantage, double clip_range) {
    const double clipped = std::clamp(ratio, 1.0 - clip_range, 1.0 + clip_range);
    return std::min(ratio * advantage, clipped * advantage);
}

double kl_estimate(double logp_current, double logp_ref) {
    const double d = logp_ref - logp_current;
    // expm1 keeps the estimate non-negative near d = 0.
    return std::max(0.0, std::expm1(d) - d);
}

SurrogateResult clipped_surrogate(const GroupBatch& batch, const GrpoConfig& cfg) {
    if (!(cfg.clip_range > 0.0)) {
        throw Error(ErrorCode::BadConfig, "clip_range must be > 0");
    }
    const std::size_t n = batch.returns.size();
    if (batch.logp_current.size() != n || batch.logp_old.size() != n ||
        batch.logp_ref.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "log-prob lists must have one entry per trajectory");
    }
    SurrogateResult out;
    out.advantages = group_advantages(batch.returns, cfg.std_floor);

    double kl_sum = 0.0;
    std::size_t actions = 0;
    double term_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (batch.logp_ref[i].size() != batch.logp_current[i].size()) {
            throw Error(ErrorCode::LengthMismatch, "current and reference log-probs differ in length");
        }
        const auto ratios = importance_ratios(batch.logp_current[i], batch.logp_old[i]);
        std::vector<double> terms(ratios.size());
        double traj_sum = 0.0;
        for (std::size_t t = 0; t < ratios.size(); ++t) {
            terms[t] = clipped_term(ratios[t], out.advantages[i], cfg.clip_range);
            traj_sum += terms[t];
            kl_sum += kl_estimate(batch.logp_current[i][t], batch.logp_ref[i][t]);
        }
        actions += ratios.size();
        if (!ratios.empty()) {
            term_sum += traj_sum / static_cast<double>(ratios.size());
        }
        out.per_action_terms.push_back(std::move(terms));
    }
    out.kl = actions == 0 ? 0.0 : kl_sum / static_cast<double>(actions);
    out.objective = term_sum / static_cast<double>(n) - cfg.kl_coeff * out.kl;
    return out;
}

std::pair<GroupBatch, GrpoConfig> batch_from_json(const nlohmann::json& j) {
    try {
        GroupBatch batch;
        GrpoConfig cfg;
        batch.returns = j.at("returns").get<std::vector<double>>();
        batch.logp_current = j.at("logp_current").get<std::vector<std::vector<double>>>();
        batch.logp_old = j.at("logp_old").get<std::vector<std::vector<double>>>();
        batch.logp_ref = j.at("logp_ref").get<std::vector<std::vector<double>>>();
        cfg.clip_range = j.value("clip_range", cfg.clip_range);
        cfg.kl_coeff = j.value("beta", cfg.kl_coeff);
        cfg.std_floor = j.value("std_floor", cfg.std_floor);
        return {std::move(batch), cfg};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadRequest, std::string("malformed GRPO batch: ") + e.what());
    }
}

nlohmann::ordered_json result_to_json(const SurrogateResult& result) {
    nlohmann::ordered_json j;
    j["advantages"] = result.advantages;
    j["per_action_terms"] = result.per_action_terms;
    j["kl"] = result.kl;
    j["objective"] = result.objective;
    return j;
}

}  // namespace envforge::grpo
