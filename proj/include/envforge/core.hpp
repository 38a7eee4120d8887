#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "envforge/augment_spec.hpp"

namespace envforge {

enum class EnvId { sokoban, house, shop };

std::string_view to_string(EnvId id) noexcept;
/// Throws Error(BadConfig) for unknown names.
EnvId env_id_from_string(std::string_view name);

struct EpisodeConfig {
    int max_steps = 15;
    double success_reward = 10.0;
    double failure_reward = 0.0;
    double invalid_penalty = -0.1;
    bool thinking_required = true;

    void validate() const;

    bool operator==(const EpisodeConfig&) const = default;
};

/// Step budgets: Sokoban 15, household 50, shop 15.
EpisodeConfig default_config(EnvId id);

/// Half-open byte range [start, end) inside an observation's text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
};

struct Observation {
    std::string text;
    std::vector<std::string> admissible_actions;
    std::string task;
    std::vector<Span> injected_spans;
};

/// Removes every span from text. Spans must be sorted, disjoint and in
/// bounds; otherwise throws std::invalid_argument.
std::string strip_spans(std::string_view text, const std::vector<Span>& spans);

struct StepRecord {
    int t = 0;
    Observation observation;
    std::string raw_response;
    std::optional<std::string> parsed_action;
    bool invalid = false;
    double reward = 0.0;
    bool done = false;
    bool truncated = false;
};

struct Trajectory {
    EnvId env_id = EnvId::sokoban;
    std::uint64_t seed = 0;
    EpisodeConfig config;
    std::optional<AugmentSpec> augment;
    std::vector<StepRecord> steps;
    bool success = false;
    double total_reward = 0.0;
};

struct ParsedResponse {
    std::optional<std::string> thinking;
    std::string action;
};

struct ParseFailure {
    std::string reason;
};

using ParseResult = std::variant<ParsedResponse, ParseFailure>;

/// Extracts the first well-formed <action>...</action> pair (trimmed). When
/// thinking_required, a complete <think>...</think> pair must close before
/// the action pair opens; its content is returned verbatim.
ParseResult parse_agent_response(std::string_view raw, bool thinking_required);

/// "Still" for invalid steps, otherwise the accepted action.
std::string trace_action_label(const StepRecord& step);

/// History block in the prompt style used by the environments:
/// "[Text Observation t: <obs> Action t: '<label>']" for the last `window`
/// steps, oldest first.
std::string format_history(const std::vector<StepRecord>& steps, std::size_t window);

std::string trim(std::string_view s);

}  // namespace envforge
