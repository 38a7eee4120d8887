#include "envforge/core.hpp"

#include <cmath>
#include <stdexcept>

#include "envforge/error.hpp"

namespace envforge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseFailure: return "ParseFailure";
        case ErrorCode::SessionTerminated: return "SessionTerminated";
        case ErrorCode::GenerationExhausted: return "GenerationExhausted";
        case ErrorCode::InfeasibleTask: return "InfeasibleTask";
        case ErrorCode::InfeasibleGoal: return "InfeasibleGoal";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ZeroBaseline: return "ZeroBaseline";
        case ErrorCode::KeyMismatch: return "KeyMismatch";
        case ErrorCode::InsufficientEntries: return "InsufficientEntries";
        case ErrorCode::GroupTooSmall: return "GroupTooSmall";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::PolicyFailure: return "PolicyFailure";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::BadRequest: return "BadRequest";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::Busy: return "Busy";
    }
    return "Unknown";
}

std::string_view to_string(EnvId id) noexcept {
    switch (id) {
        case EnvId::sokoban: return "sokoban";
        case EnvId::house: return "house";
        case EnvId::shop: return "shop";
    }
    return "unknown";
}

EnvId env_id_from_string(std::string_view name) {
    if (name == "sokoban") return EnvId::sokoban;
    if (name == "house") return EnvId::house;
    if (name == "shop") return EnvId::shop;
    throw Error(ErrorCode::BadConfig, "unknown env '" + std::string(name) + "'");
}

void EpisodeConfig::validate() const {
    if (max_steps < 1) {
        throw Error(ErrorCode::BadConfig, "max_steps must be >= 1");
    }
    if (!std::isfinite(success_reward) || !std::isfinite(failure_reward) ||
        !std::isfinite(invalid_penalty)) {
        throw Error(ErrorCode::BadConfig, "rewards must be finite");
    }
    if (!(success_reward > failure_reward)) {
        throw Error(ErrorCode::BadConfig, "success_reward must exceed failure_reward");
    }
    if (invalid_penalty > 0.0) {
        throw Error(ErrorCode::BadConfig, "invalid_penalty must be <= 0");
    }
}

void AugmentSpec::validate() const {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw Error(ErrorCode::BadConfig, "augment epsilon must be >= 0");
    }
    if (!(prob >= 0.0 && prob <= 1.0)) {
        throw Error(ErrorCode::BadConfig, "augment prob must lie in [0, 1]");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::BadConfig, "augment alpha must lie in [0, 1]");
    }
}

EpisodeConfig default_config(EnvId id) {
    EpisodeConfig cfg;
    cfg.max_steps = id == EnvId::house ? 50 : 15;
    return cfg;
}

std::string strip_spans(std::string_view text, const std::vector<Span>& spans) {
    std::string out;
    out.reserve(text.size());
    std::size_t cursor = 0;
    for (const auto& span : spans) {
        if (span.start < cursor || span.end < span.start || span.end > text.size()) {
            throw std::invalid_argument("strip_spans: spans must be sorted, disjoint and in bounds");
        }
        out.append(text.substr(cursor, span.start - cursor));
        cursor = span.end;
    }
    out.append(text.substr(cursor));
    return out;
}

std::string trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

namespace {

struct TagPair {
    std::size_t open = 0;         // position of the opening tag
    std::size_t content = 0;      // first byte after the opening tag
    std::size_t close = 0;        // position of the closing tag
    std::size_t after = 0;        // first byte after the closing tag
};

// Finds the first pair of <name>...</name>. A closing tag seen before any
// opening tag, or a second opening tag before the close, is unbalanced.
std::variant<std::monostate, TagPair, ParseFailure> find_pair(std::string_view raw,
                                                              std::string_view name) {
    const std::string open = "<" + std::string(name) + ">";
    const std::string close = "</" + std::string(name) + ">";

    const auto first_open = raw.find(open);
    const auto first_close = raw.find(close);
    if (first_open == std::string_view::npos && first_close == std::string_view::npos) {
        return std::monostate{};
    }
    if (first_open == std::string_view::npos || first_close < first_open) {
        return ParseFailure{"unbalanced " + close + " before " + open};
    }
    const auto content = first_open + open.size();
    const auto close_pos = raw.find(close, content);
    if (close_pos == std::string_view::npos) {
        return ParseFailure{"missing " + close};
    }
    const auto nested = raw.find(open, content);
    if (nested != std::string_view::npos && nested < close_pos) {
        return ParseFailure{"nested " + open};
    }
    return TagPair{first_open, content, close_pos, close_pos + close.size()};
}

}  // namespace

ParseResult parse_agent_response(std::string_view raw, bool thinking_required) {
    auto action_pair = find_pair(raw, "action");
    if (auto* fail = std::get_if<ParseFailure>(&action_pair)) {
        return *fail;
    }
    if (std::holds_alternative<std::monostate>(action_pair)) {
        return ParseFailure{"no <action> tag"};
    }
    const auto& action = std::get<TagPair>(action_pair);

    ParsedResponse parsed;
    parsed.action = trim(raw.substr(action.content, action.close - action.content));
    if (parsed.action.empty()) {
        return ParseFailure{"empty action"};
    }

    // Only the text ahead of the action pair may hold the reasoning.
    auto think_pair = find_pair(raw.substr(0, action.open), "think");
    if (auto* pair = std::get_if<TagPair>(&think_pair)) {
        parsed.thinking = std::string(raw.substr(pair->content, pair->close - pair->content));
    } else if (thinking_required) {
        if (auto* fail = std::get_if<ParseFailure>(&think_pair)) {
            return *fail;
        }
        return ParseFailure{"missing <think> block before the action"};
    }
    return parsed;
}

std::string trace_action_label(const StepRecord& step) {
    if (step.invalid || !step.parsed_action) {
        return "Still";
    }
    return *step.parsed_action;
}

std::string format_history(const std::vector<StepRecord>& steps, std::size_t window) {
    std::string out;
    const std::size_t begin = steps.size() > window ? steps.size() - window : 0;
    for (std::size_t i = begin; i < steps.size(); ++i) {
        const auto& step = steps[i];
        if (!out.empty()) {
            out += ' ';
        }
        const auto t = std::to_string(step.t);
        out += "[Text Observation " + t + ":  " + step.observation.text + " Action " + t + ": '" +
               trace_action_label(step) + "']";
    }
    return out;
}

}  // namespace envforge
