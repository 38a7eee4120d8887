#include <gtest/gtest.h>

#include "envforge/core.hpp"
#include "envforge/error.hpp"
#include "envforge/rng.hpp"

using namespace envforge;

namespace {

ParsedResponse expect_ok(const ParseResult& r) {
    const auto* ok = std::get_if<ParsedResponse>(&r);
    EXPECT_NE(ok, nullptr) << (ok ? "" : std::get<ParseFailure>(r).reason);
    return ok ? *ok : ParsedResponse{};
}

bool failed(const ParseResult& r) {
    return std::holds_alternative<ParseFailure>(r);
}

}  // namespace

TEST(ParseResponse, ThinkThenAction) {
    const auto r = expect_ok(parse_agent_response("<think>go right to push</think><action>right</action>", true));
    ASSERT_TRUE(r.thinking.has_value());
    EXPECT_EQ(*r.thinking, "go right to push");
    EXPECT_EQ(r.action, "right");
}

TEST(ParseResponse, ActionOnlyWhenThinkingOff) {
    const auto r = expect_ok(parse_agent_response("<action>up</action>", false));
    EXPECT_FALSE(r.thinking.has_value());
    EXPECT_EQ(r.action, "up");
}

TEST(ParseResponse, UntaggedTextFails) {
    EXPECT_TRUE(failed(parse_agent_response("I move right.", false)));
    EXPECT_TRUE(failed(parse_agent_response("I move right.", true)));
}

TEST(ParseResponse, MissingThinkFailsWhenRequired) {
    EXPECT_TRUE(failed(parse_agent_response("<action>up</action>", true)));
}

TEST(ParseResponse, ThinkAfterActionDoesNotCount) {
    EXPECT_TRUE(failed(parse_agent_response("<action>up</action><think>x</think>", true)));
}

TEST(ParseResponse, FirstActionWinsAndIsTrimmed) {
    const auto r = expect_ok(parse_agent_response("<action>  left \n</action> blah <action>up</action>", false));
    EXPECT_EQ(r.action, "left");
}

TEST(ParseResponse, ThinkingReturnedVerbatim) {
    const auto r = expect_ok(parse_agent_response("<think>  a\nb  </think>\n<action>down</action>", true));
    EXPECT_EQ(*r.thinking, "  a\nb  ");
}

TEST(ParseResponse, UnbalancedTagsFail) {
    EXPECT_TRUE(failed(parse_agent_response("<action>up", false)));
    EXPECT_TRUE(failed(parse_agent_response("up</action>", false)));
    EXPECT_TRUE(failed(parse_agent_response("</action><action>up</action>", false)));
    EXPECT_TRUE(failed(parse_agent_response("<action>a<action>b</action>", false)));
    EXPECT_TRUE(failed(parse_agent_response("<think>x<action>up</action>", true)));
}

TEST(ParseResponse, EmptyActionFails) {
    EXPECT_TRUE(failed(parse_agent_response("<action>   </action>", false)));
}

TEST(ParseResponse, IdempotentOnWellFormedPair) {
    Rng rng(11);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz[]()0123456789_-";
    for (int i = 0; i < 500; ++i) {
        std::string a;
        const auto len = 1 + rng.below(20);
        for (std::uint64_t k = 0; k < len; ++k) {
            a += alphabet[rng.below(alphabet.size())];
        }
        const auto r = expect_ok(parse_agent_response("<think>x</think><action>" + a + "</action>", true));
        EXPECT_EQ(r.action, a);
    }
}

TEST(StripSpans, RemovesRanges) {
    EXPECT_EQ(strip_spans("abcdef", {{1, 2}, {4, 6}}), "acd");
    EXPECT_EQ(strip_spans("abc", {}), "abc");
    EXPECT_EQ(strip_spans("abc", {{0, 1}, {1, 3}}), "");
}

TEST(StripSpans, RejectsBadSpans) {
    EXPECT_THROW(strip_spans("abc", {{2, 3}, {0, 1}}), std::invalid_argument);
    EXPECT_THROW(strip_spans("abc", {{0, 4}}), std::invalid_argument);
    EXPECT_THROW(strip_spans("abc", {{2, 1}}), std::invalid_argument);
}

TEST(Config, DefaultsPerEnvironment) {
    EXPECT_EQ(default_config(EnvId::sokoban).max_steps, 15);
    EXPECT_EQ(default_config(EnvId::house).max_steps, 50);
    EXPECT_EQ(default_config(EnvId::shop).max_steps, 15);
    const auto cfg = default_config(EnvId::sokoban);
    EXPECT_EQ(cfg.success_reward, 10.0);
    EXPECT_EQ(cfg.failure_reward, 0.0);
    EXPECT_EQ(cfg.invalid_penalty, -0.1);
}

TEST(Config, ValidationRejectsBadValues) {
    EpisodeConfig cfg;
    cfg.max_steps = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.invalid_penalty = 0.5;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.success_reward = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    AugmentSpec spec;
    spec.prob = 1.5;
    EXPECT_THROW(spec.validate(), Error);
    spec = {};
    spec.epsilon = -1;
    EXPECT_THROW(spec.validate(), Error);
}

TEST(EnvNames, RoundTripAndUnknown) {
    for (auto id : {EnvId::sokoban, EnvId::house, EnvId::shop}) {
        EXPECT_EQ(env_id_from_string(to_string(id)), id);
    }
    try {
        env_id_from_string("sciworld");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadConfig);
    }
}

TEST(Trace, InvalidStepRendersStill) {
    StepRecord s;
    s.t = 27;
    s.observation.text = "Wall at (0, 0)";
    s.invalid = true;
    s.parsed_action = "jump";
    EXPECT_EQ(trace_action_label(s), "Still");
    EXPECT_EQ(format_history({s}, 1), "[Text Observation 27:  Wall at (0, 0) Action 27: 'Still']");
    s.invalid = false;
    s.parsed_action = "up";
    EXPECT_EQ(trace_action_label(s), "up");
}

TEST(Trace, HistoryKeepsLastWindow) {
    std::vector<StepRecord> steps(3);
    for (int i = 0; i < 3; ++i) {
        steps[i].t = i + 1;
        steps[i].observation.text = "o" + std::to_string(i + 1);
        steps[i].parsed_action = "a";
    }
    EXPECT_EQ(format_history(steps, 2),
              "[Text Observation 2:  o2 Action 2: 'a'] [Text Observation 3:  o3 Action 3: 'a']");
}

TEST(Rng, DeterministicAndBounded) {
    Rng a(5), b(5);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.below(7);
        EXPECT_EQ(x, b.below(7));
        EXPECT_LT(x, 7u);
        const auto y = a.between(-3, 3);
        b.between(-3, 3);
        EXPECT_GE(y, -3);
        EXPECT_LE(y, 3);
        const double u = a.uniform01();
        b.uniform01();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Rng, DerivedSeedsDiffer) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}

TEST(Rng, BelowIsRoughlyUniform) {
    Rng rng(3);
    std::array<int, 6> counts{};
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        ++counts[rng.below(6)];
    }
    for (int c : counts) {
        EXPECT_NEAR(c, n / 6, 400);
    }
}
