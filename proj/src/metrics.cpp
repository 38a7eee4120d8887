#include "envforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>

#include "envforge/error.hpp"

namespace envforge::metrics {

namespace {

std::int64_t thousandths(double x) {
    return std::llround(x * 1000.0);
}

}  // namespace

double avg_char_count(const std::vector<Trajectory>& trajectories) {
    std::size_t total = 0;
    std::size_t count = 0;
    for (const auto& traj : trajectories) {
        for (const auto& step : traj.steps) {
            total += strip_spans(step.observation.text, step.observation.injected_spans).size();
            ++count;
        }
    }
    if (count == 0) {
        throw Error(ErrorCode::EmptyInput, "no observations");
    }
    return static_cast<double>(total) / static_cast<double>(count);
}

double avg_traj_length(const std::vector<Trajectory>& trajectories, int t_max) {
    if (trajectories.empty()) {
        throw Error(ErrorCode::EmptyInput, "no trajectories");
    }
    if (t_max < 1) {
        throw Error(ErrorCode::BadConfig, "t_max must be >= 1");
    }
    double total = 0.0;
    for (const auto& traj : trajectories) {
        total += traj.success ? static_cast<double>(traj.steps.size()) : t_max;
    }
    return total / static_cast<double>(trajectories.size());
}

double success_rate(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) {
        throw Error(ErrorCode::EmptyInput, "no trajectories");
    }
    const auto wins = std::count_if(trajectories.begin(), trajectories.end(),
                                    [](const Trajectory& t) { return t.success; });
    return 100.0 * static_cast<double>(wins) / static_cast<double>(trajectories.size());
}

double id_delta(double final_rate, double base_rate) {
    return final_rate - base_rate;
}

double rel_change(double after_rate, double before_rate) {
    if (before_rate == 0.0) {
        throw Error(ErrorCode::ZeroBaseline, "baseline rate is zero");
    }
    return 100.0 * (after_rate - before_rate) / before_rate;
}

double ood_change(const std::map<std::string, double>& baseline,
                  const std::map<std::string, double>& augmented) {
    if (baseline.size() != augmented.size() ||
        !std::equal(baseline.begin(), baseline.end(), augmented.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        throw Error(ErrorCode::KeyMismatch, "baseline and augmented eval domains differ");
    }
    double base_sum = 0.0;
    double diff_sum = 0.0;
    for (const auto& [domain, rate] : baseline) {
        base_sum += rate;
        diff_sum += augmented.at(domain) - rate;
    }
    if (base_sum == 0.0) {
        throw Error(ErrorCode::ZeroBaseline, "baseline OOD sum is zero");
    }
    return 100.0 * diff_sum / base_sum;
}

std::map<std::string, Ranking> ood_ranking(const ResultMatrix& matrix, double tie_threshold) {
    // eval domain -> (rate, train domain) for OOD cells only
    std::map<std::string, std::vector<std::pair<std::int64_t, std::string>>> columns;
    std::map<std::string, Ranking> out;
    for (const auto& row : matrix.rows) {
        out[row.train];
        for (const auto& [eval, rate] : row.evals) {
            if (eval != row.train) {
                columns[eval].emplace_back(thousandths(rate), row.train);
            }
        }
    }
    const std::int64_t threshold = thousandths(tie_threshold);
    for (auto& [eval, entries] : columns) {
        if (entries.size() < 2) {
            throw Error(ErrorCode::InsufficientEntries,
                        "eval domain '" + eval + "' has fewer than two OOD entries");
        }
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        int rank = 1;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i > 0 && entries[i - 1].first - entries[i].first >= threshold) {
                ++rank;
            }
            Ranking& r = out[entries[i].second];
            r.ranks[eval] = rank;
            r.score += rank;
        }
    }
    return out;
}

ResultMatrix matrix_from_json(const nlohmann::json& j) {
    try {
        ResultMatrix m;
        for (const auto& row : j.at("rows")) {
            MatrixRow r;
            r.train = row.at("train").get<std::string>();
            for (const auto& [domain, rate] : row.at("evals").items()) {
                r.evals[domain] = rate.get<double>();
            }
            if (row.contains("id_rate") && !row.at("id_rate").is_null()) {
                r.id_rate = row.at("id_rate").get<double>();
            }
            m.rows.push_back(std::move(r));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadRequest, std::string("malformed results matrix: ") + e.what());
    }
}

nlohmann::ordered_json ranking_to_json(const std::map<std::string, Ranking>& ranking) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [train, r] : ranking) {
        nlohmann::ordered_json ranks = nlohmann::ordered_json::object();
        for (const auto& [eval, rank] : r.ranks) {
            ranks[eval] = rank;
        }
        j[train] = {{"ranks", ranks}, {"score", r.score}};
    }
    return j;
}

std::string ranking_to_text(const std::map<std::string, Ranking>& ranking) {
    std::set<std::string> evals;
    std::size_t name_width = 5;
    for (const auto& [train, r] : ranking) {
        name_width = std::max(name_width, train.size());
        for (const auto& [eval, rank] : r.ranks) {
            evals.insert(eval);
        }
    }
    std::vector<std::pair<std::string, const Ranking*>> rows;
    for (const auto& [train, r] : ranking) {
        rows.emplace_back(train, &r);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second->score < b.second->score; });

    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(name_width)) << "train";
    for (const auto& e : evals) {
        os << "  " << std::right << std::setw(static_cast<int>(std::max<std::size_t>(e.size(), 2))) << e;
    }
    os << "  score\n";
    for (const auto& [train, r] : rows) {
        os << std::left << std::setw(static_cast<int>(name_width)) << train;
        for (const auto& e : evals) {
            const auto it = r->ranks.find(e);
            os << "  " << std::right << std::setw(static_cast<int>(std::max<std::size_t>(e.size(), 2)))
               << (it == r->ranks.end() ? std::string("-") : std::to_string(it->second));
        }
        os << "  " << std::setw(5) << r->score << '\n';
    }
    return os.str();
}

}  // namespace envforge::metrics
