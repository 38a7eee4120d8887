#include <gtest/gtest.h>

#include "envforge/error.hpp"
#include "envforge/rollout.hpp"
#include "envforge/trajectory_io.hpp"

using namespace envforge;
using namespace envforge::rollout;

namespace {

AugmentSpec spec_with(double epsilon) {
    AugmentSpec s;
    s.epsilon = epsilon;
    return s;
}

SuiteOptions suite(EnvId env, PolicyKind kind, int n, int threads) {
    SuiteOptions o;
    o.env = env;
    o.n_episodes = n;
    o.suite_seed = 21;
    o.policy = {kind, true};
    o.threads = threads;
    return o;
}

}  // namespace

TEST(RolloutPolicies, NamesRoundTrip) {
    for (const auto k : {PolicyKind::sokoban_bfs, PolicyKind::sokoban_bfs_text, PolicyKind::sokoban_random,
                         PolicyKind::house_greedy, PolicyKind::shop_greedy, PolicyKind::uniform_random,
                         PolicyKind::remote}) {
        EXPECT_EQ(policy_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(policy_kind_from_string("oracle"), Error);
}

TEST(RolloutPolicies, ResponseFormat) {
    EXPECT_EQ(format_response("up", "plan", true), "<think>plan</think><action>up</action>");
    EXPECT_EQ(format_response("up", "plan", false), "<action>up</action>");
}

TEST(RolloutPolicies, RemoteCannotRunInProcess) {
    try {
        run_episode(EnvId::sokoban, 1, default_config(EnvId::sokoban), std::nullopt,
                    {PolicyKind::remote, true});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PolicyFailure);
    }
}

TEST(RolloutPolicies, SearchTemplateFilledWithTask) {
    Observation obs;
    obs.admissible_actions = {"search[<query>]"};
    obs.task = "Find me a shirt";
    Rng rng(1);
    EXPECT_EQ(pick_admissible(obs, rng), "search[Find me a shirt]");
}

TEST(RolloutPolicies, ScriptedPoliciesSucceed) {
    const std::pair<EnvId, PolicyKind> cases[] = {
        {EnvId::sokoban, PolicyKind::sokoban_bfs},
        {EnvId::sokoban, PolicyKind::sokoban_bfs_text},
        {EnvId::house, PolicyKind::house_greedy},
        {EnvId::shop, PolicyKind::shop_greedy},
    };
    for (const auto& [env, kind] : cases) {
        auto o = suite(env, kind, 30, 4);
        o.augment = spec_with(300);
        const auto r = run_suite(o);
        EXPECT_DOUBLE_EQ(r.summary.success_rate, 100.0) << to_string(kind);
        for (const auto& t : r.trajectories) {
            for (const auto& s : t.steps) EXPECT_FALSE(s.invalid);
        }
    }
}

TEST(RolloutPolicies, BfsStepsEqualPlanLength) {
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto seed = episode_seed(3, k);
        const auto env = make_environment(EnvId::sokoban, seed, default_config(EnvId::sokoban));
        const auto plan = sokoban::solve_bfs(dynamic_cast<const SokobanEnv&>(*env).state());
        ASSERT_TRUE(plan.has_value());
        const auto t = run_episode(EnvId::sokoban, seed, default_config(EnvId::sokoban), std::nullopt,
                                   {PolicyKind::sokoban_bfs, true});
        EXPECT_EQ(t.steps.size(), plan->size());
        EXPECT_TRUE(t.success);
    }
}

TEST(RolloutPolicies, TextParserIgnoresDistractorLines) {
    const auto env = make_environment(EnvId::sokoban, 7, default_config(EnvId::sokoban));
    Rng rng(2);
    const auto obs = env->augment(env->render(), spec_with(300), rng);
    EXPECT_EQ(parse_sokoban_observation(obs.text), dynamic_cast<const SokobanEnv&>(*env).state());
}

TEST(RolloutSuite, IndependentOfThreadCount) {
    for (const EnvId env : {EnvId::sokoban, EnvId::house, EnvId::shop}) {
        auto one = suite(env, PolicyKind::uniform_random, 24, 1);
        one.augment = spec_with(80);
        auto many = one;
        many.threads = 8;
        const auto a = run_suite(one);
        const auto b = run_suite(many);
        ASSERT_EQ(a.trajectories.size(), 24u);
        for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
            EXPECT_EQ(trajectory_to_line(a.trajectories[i]), trajectory_to_line(b.trajectories[i]));
        }
        EXPECT_EQ(a.summary.avg_char_count, b.summary.avg_char_count);
    }
}

TEST(RolloutSuite, EpisodeSeedsFollowSuiteSeed) {
    const auto r = run_suite(suite(EnvId::sokoban, PolicyKind::sokoban_random, 5, 2));
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(r.trajectories[k].seed, episode_seed(21, k));
    }
    EXPECT_NE(episode_seed(21, 0), episode_seed(21, 1));
}

TEST(RolloutSuite, RandomShopperRarelySucceeds) {
    const auto r = run_suite(suite(EnvId::shop, PolicyKind::uniform_random, 20, 4));
    EXPECT_LT(r.summary.success_rate, 50.0);
    EXPECT_GE(r.summary.avg_traj_length, 1.0);
    EXPECT_LE(r.summary.avg_traj_length, 15.0);
}

TEST(RolloutSuite, AugmentationRaisesVisibleLengthOnly) {
    auto plain = suite(EnvId::sokoban, PolicyKind::sokoban_bfs, 10, 2);
    auto noisy = plain;
    noisy.augment = spec_with(300);
    const auto a = run_suite(plain);
    const auto b = run_suite(noisy);
    // avg_char_count measures the stripped text, so both agree.
    EXPECT_DOUBLE_EQ(a.summary.avg_char_count, b.summary.avg_char_count);
    std::size_t plain_bytes = 0, noisy_bytes = 0;
    for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
        for (const auto& s : a.trajectories[i].steps) plain_bytes += s.observation.text.size();
        for (const auto& s : b.trajectories[i].steps) noisy_bytes += s.observation.text.size();
    }
    EXPECT_GT(noisy_bytes, plain_bytes);
}

TEST(RolloutSuite, GroundTruthPlannerIgnoresAugmentation) {
    auto plain = suite(EnvId::sokoban, PolicyKind::sokoban_bfs, 40, 4);
    auto noisy = plain;
    noisy.augment = spec_with(300);
    const auto a = run_suite(plain);
    const auto b = run_suite(noisy);
    EXPECT_EQ(a.summary.success_rate, b.summary.success_rate);
    EXPECT_EQ(a.summary.avg_traj_length, b.summary.avg_traj_length);
}
