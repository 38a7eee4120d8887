#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "envforge/core.hpp"

namespace envforge::metrics {

/// Mean byte length of the pre-augmentation observation text over every
/// step. Throws Error(EmptyInput) when there is no step at all.
double avg_char_count(const std::vector<Trajectory>& trajectories);

/// Mean step count; failed trajectories count as t_max.
double avg_traj_length(const std::vector<Trajectory>& trajectories, int t_max);

/// Percentage of successful trajectories.
double success_rate(const std::vector<Trajectory>& trajectories);

/// Percentage-point change.
double id_delta(double final_rate, double base_rate);

/// 100 * (after - before) / before. Throws Error(ZeroBaseline).
double rel_change(double after_rate, double before_rate);

/// 100 * sum(augmented - baseline) / sum(baseline) over the eval domains.
/// Throws Error(KeyMismatch) or Error(ZeroBaseline).
double ood_change(const std::map<std::string, double>& baseline,
                  const std::map<std::string, double>& augmented);

struct MatrixRow {
    std::string train;
    std::map<std::string, double> evals;  // an entry keyed by `train` is the ID cell
    std::optional<double> id_rate;
};

struct ResultMatrix {
    std::vector<MatrixRow> rows;
};

struct Ranking {
    std::map<std::string, int> ranks;  // eval domain -> rank
    int score = 0;
};

/// Per eval column, OOD rates sorted descending get dense ranks; an entry
/// within tie_threshold of the previous one shares its rank. Rates are
/// compared in integer thousandths. Throws Error(InsufficientEntries) when
/// a column has fewer than two OOD entries.
std::map<std::string, Ranking> ood_ranking(const ResultMatrix& matrix,
                                           double tie_threshold = 0.5);

/// {rows:[{train, evals:{domain: rate}, id_rate}]}; throws Error(BadRequest).
ResultMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json ranking_to_json(const std::map<std::string, Ranking>& ranking);

/// Aligned text table, one row per training domain sorted by score.
std::string ranking_to_text(const std::map<std::string, Ranking>& ranking);

}  // namespace envforge::metrics
