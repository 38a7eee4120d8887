#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "envforge/augment.hpp"
#include "envforge/environment.hpp"
#include "envforge/error.hpp"
#include "envforge/grpo.hpp"
#include "envforge/metrics.hpp"
#include "envforge/rollout.hpp"
#include "envforge/service.hpp"
#include "envforge/trajectory_io.hpp"

namespace {

using namespace envforge;
using nlohmann::json;
using nlohmann::ordered_json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::BadConfig, "cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::BadRequest, path + ": " + e.what());
    }
}

std::uint64_t env_default_seed() {
    if (const char* s = std::getenv("ENVFORGE_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw Error(ErrorCode::BadConfig, "ENVFORGE_SEED must be an unsigned integer");
        }
    }
    return 0;
}

// Next ground-truth action, used to walk an episode before previewing.
std::optional<std::string> scripted_action(const Environment& env) {
    if (const auto* s = dynamic_cast<const SokobanEnv*>(&env)) {
        const auto plan = sokoban::solve_bfs(s->state());
        if (!plan || plan->empty()) return std::nullopt;
        return std::string(sokoban::to_string(plan->front()));
    }
    if (const auto* h = dynamic_cast<const HouseEnv*>(&env)) {
        return house::greedy_action(h->state());
    }
    if (const auto* p = dynamic_cast<const ShopEnv*>(&env)) {
        return shop::greedy_action(p->state());
    }
    return std::nullopt;
}

struct AugmentArgs {
    std::optional<double> epsilon;
    double prob = 1.0;
    double alpha = 0.5;
    std::uint64_t seed = 0;

    std::optional<AugmentSpec> spec() const {
        if (!epsilon) return std::nullopt;
        AugmentSpec s;
        s.epsilon = *epsilon;
        s.prob = prob;
        s.alpha = alpha;
        s.seed = seed;
        s.validate();
        return s;
    }
};

void add_augment_flags(CLI::App* cmd, AugmentArgs& a) {
    cmd->add_option("--augment-epsilon", a.epsilon, "Distractor volume; enables augmentation");
    cmd->add_option("--augment-prob", a.prob, "Per-trajectory application probability");
    cmd->add_option("--augment-alpha", a.alpha, "Results-page fill factor");
    cmd->add_option("--augment-seed", a.seed, "Augmentation stream seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Text-environment toolkit: simulators, augmentation, metrics and a rollout server"};
    app.set_version_flag("--version", std::string("envforge ") + ENVFORGE_VERSION);
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "Run the line-delimited JSON rollout server");
    std::string transport = "stdio";
    std::size_t max_sessions = service::kDefaultMaxSessions;
    serve->add_option("--transport", transport, "stdio or tcp:HOST:PORT");
    serve->add_option("--max-sessions", max_sessions, "Concurrent session cap");

    // rollout
    auto* roll = app.add_subcommand("rollout", "Run scripted-policy episodes and write JSONL");
    std::string env_name = "sokoban";
    std::string policy_name = "uniform_random";
    int episodes = 1;
    std::optional<std::uint64_t> suite_seed;
    bool no_thinking = false;
    int threads = 0;
    std::string out_path = "-";
    AugmentArgs roll_aug;
    roll->add_option("--env", env_name, "sokoban | house | shop")->required();
    roll->add_option("--policy", policy_name, "Policy kind")->required();
    roll->add_option("--episodes", episodes, "Episode count");
    roll->add_option("--seed", suite_seed, "Suite seed (default: ENVFORGE_SEED or 0)");
    roll->add_flag("--no-thinking", no_thinking, "Neither emit nor require <think> blocks");
    roll->add_option("--threads", threads, "Worker threads (0 = all cores)");
    roll->add_option("--out", out_path, "Output JSONL file, '-' for stdout");
    add_augment_flags(roll, roll_aug);

    // metrics
    auto* met = app.add_subcommand("metrics", "Summarize a trajectory JSONL file");
    std::string met_in;
    std::optional<int> t_max;
    met->add_option("--in", met_in, "Trajectory JSONL")->required();
    met->add_option("--t-max", t_max, "Failure length (default: the logged max_steps)");

    // rank
    auto* rank = app.add_subcommand("rank", "OOD ranking scores from a results matrix");
    std::string rank_in;
    double tie_threshold = 0.5;
    rank->add_option("--in", rank_in, "Results JSON {rows:[{train, evals, id_rate}]}")->required();
    rank->add_option("--tie-threshold", tie_threshold, "Rates closer than this tie");

    // augment-preview
    auto* prev = app.add_subcommand("augment-preview", "Show one observation before and after augmentation");
    std::string prev_env = "sokoban";
    std::uint64_t prev_seed = 0;
    int walk = 0;
    AugmentArgs prev_aug;
    prev_aug.epsilon = 80.0;
    prev->add_option("--env", prev_env, "sokoban | house | shop");
    prev->add_option("--seed", prev_seed, "Environment seed");
    prev->add_option("--walk", walk, "Scripted steps to take before previewing");
    add_augment_flags(prev, prev_aug);

    // grpo-check
    auto* grpo_cmd = app.add_subcommand("grpo-check", "Evaluate GRPO advantages and objective");
    std::string grpo_in;
    grpo_cmd->add_option("--in", grpo_in, "Batch JSON")->required();

    // export-catalog
    auto* cat = app.add_subcommand("export-catalog", "Write a generated shop catalog as JSON");
    std::uint64_t cat_seed = 0;
    int cat_products = kDefaultShopProducts;
    std::string cat_out = "-";
    cat->add_option("--seed", cat_seed, "Catalog seed");
    cat->add_option("--products", cat_products, "Number of products");
    cat->add_option("--out", cat_out, "Output file, '-' for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            service::ServerOptions options;
            options.max_sessions = max_sessions;
            options.default_seed = env_default_seed();
            service::Server server(options);
            if (transport == "stdio") {
                std::ios::sync_with_stdio(false);
                server.serve_stream(std::cin, std::cout);
            } else {
                const auto [host, port] = service::parse_tcp_address(transport);
                std::atomic<bool> stop{false};
                server.serve_tcp(
                    host, port,
                    [&](std::uint16_t p) { std::cerr << "listening on " << host << ":" << p << std::endl; },
                    stop);
            }
        } else if (*roll) {
            rollout::SuiteOptions options;
            options.env = env_id_from_string(env_name);
            options.n_episodes = episodes;
            options.suite_seed = suite_seed.value_or(env_default_seed());
            options.policy.kind = rollout::policy_kind_from_string(policy_name);
            options.policy.emits_thinking = !no_thinking;
            EpisodeConfig cfg = default_config(options.env);
            cfg.thinking_required = !no_thinking;
            options.config = cfg;
            options.augment = roll_aug.spec();
            options.threads = threads;
            const auto result = rollout::run_suite(options);
            if (out_path == "-") {
                write_jsonl(std::cout, result.trajectories);
            } else {
                std::ofstream out(out_path);
                if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + out_path);
                write_jsonl(out, result.trajectories);
            }
            ordered_json summary;
            summary["episodes"] = episodes;
            summary["success_rate"] = result.summary.success_rate;
            summary["avg_char_count"] = result.summary.avg_char_count;
            summary["avg_traj_length"] = result.summary.avg_traj_length;
            (out_path == "-" ? std::cerr : std::cout) << summary.dump() << '\n';
        } else if (*met) {
            std::ifstream in(met_in);
            if (!in) throw Error(ErrorCode::BadConfig, "cannot open " + met_in);
            const auto trajs = read_jsonl(in);
            if (trajs.empty()) throw Error(ErrorCode::EmptyInput, "no trajectories in " + met_in);
            const int tm = t_max.value_or(trajs.front().config.max_steps);
            ordered_json summary;
            summary["episodes"] = trajs.size();
            summary["success_rate"] = metrics::success_rate(trajs);
            summary["avg_char_count"] = metrics::avg_char_count(trajs);
            summary["avg_traj_length"] = metrics::avg_traj_length(trajs, tm);
            summary["t_max"] = tm;
            std::cout << summary.dump(2) << '\n';
        } else if (*rank) {
            const auto matrix = metrics::matrix_from_json(read_json_file(rank_in));
            const auto ranking = metrics::ood_ranking(matrix, tie_threshold);
            std::cout << metrics::ranking_to_json(ranking).dump(2) << '\n'
                      << metrics::ranking_to_text(ranking);
        } else if (*prev) {
            const EnvId id = env_id_from_string(prev_env);
            auto env = make_environment(id, prev_seed, default_config(id));
            for (int i = 0; i < walk && !env->terminal(); ++i) {
                const auto action = scripted_action(*env);
                if (!action) break;
                env->apply(*action);
            }
            const auto spec = prev_aug.spec();
            const std::string before = env->render();
            Rng rng(derive_seed(spec ? spec->seed : 0, prev_seed));
            const Observation after = spec ? env->augment(before, *spec, rng) : Observation{before, {}, {}, {}};
            ordered_json j;
            j["env"] = prev_env;
            j["seed"] = prev_seed;
            j["augment"] = spec ? augment_to_json(*spec) : ordered_json(nullptr);
            j["before"] = before;
            j["after"] = after.text;
            ordered_json spans = ordered_json::array();
            for (const auto& s : after.injected_spans) {
                spans.push_back({{"start", s.start}, {"end", s.end},
                                 {"text", after.text.substr(s.start, s.end - s.start)}});
            }
            j["injected_spans"] = std::move(spans);
            std::cout << j.dump(2) << '\n';
        } else if (*grpo_cmd) {
            const auto [batch, cfg] = grpo::batch_from_json(read_json_file(grpo_in));
            std::cout << grpo::result_to_json(grpo::clipped_surrogate(batch, cfg)).dump(2) << '\n';
        } else if (*cat) {
            const std::string text = shop::catalog_to_json(shop::generate_catalog(cat_seed, cat_products));
            if (cat_out == "-") {
                std::cout << text << '\n';
            } else {
                std::ofstream out(cat_out);
                if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + cat_out);
                out << text << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
