#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// A miniature household world: numbered receptacles, portable objects and
// "put" tasks, rendered in the TextWorld/ALFRED observation style.
namespace envforge::house {

inline constexpr std::string_view kStart = "start";
inline constexpr std::string_view kInventory = "inventory";

struct Receptacle {
    std::string name;  // "<type> <id>", e.g. "drawer 5"
    bool openable = false;
    bool open = false;
    std::vector<std::string> contents;  // object names, in placement order

    bool visible_inside() const noexcept { return !openable || open; }
    bool operator==(const Receptacle&) const = default;
};

struct Object {
    std::string type;
    std::string location;  // receptacle name or kInventory

    bool operator==(const Object&) const = default;
};

enum class TaskKind { put_one, put_two };

struct TaskSpec {
    TaskKind kind = TaskKind::put_one;
    std::string object_type;
    std::string target_receptacle;  // receptacle type, e.g. "drawer"

    bool operator==(const TaskSpec&) const = default;
};

struct State {
    std::vector<Receptacle> receptacles;
    std::map<std::string, Object> objects;
    std::string agent_at = std::string(kStart);
    std::vector<std::string> inventory;  // capacity 1
    TaskSpec task;
    std::string feedback;  // outcome sentence of the previous action

    const Receptacle* find_receptacle(std::string_view name) const;
    bool operator==(const State&) const = default;
};

struct GenerateOptions {
    int n_receptacles = 8;
    int n_objects = 6;
    std::optional<TaskKind> kind;
};

inline constexpr int kMaxGenerationAttempts = 200;

/// Throws std::invalid_argument on bad sizes and Error(InfeasibleTask) when
/// no satisfiable task could be sampled.
State generate(std::uint64_t seed, const GenerateOptions& options);
State generate(std::uint64_t seed, int n_receptacles, int n_objects);

/// "find two knife and put them in drawer" / "put a knife in drawer".
std::string task_description(const TaskSpec& task);

/// Sorted, duplicate-free list of accepted commands.
std::vector<std::string> admissible(const State& s);

struct StepResult {
    State state;
    bool accepted = false;
};

StepResult step(const State& s, std::string_view action);

bool task_complete(const State& s);

/// Full observation text: welcome header, scene paragraph, then the task and
/// admissible-actions line.
std::string render(const State& s);

/// Names of every portable object in the world, e.g. {"knife 1", "cup 2"}.
std::vector<std::string> object_names(const State& s);

/// Next command of a ground-truth greedy solver, or nullopt when the task is
/// already complete.
std::optional<std::string> greedy_action(const State& s);

std::uint64_t state_hash(const State& s);

/// Splits "knife 12" into ("knife", 12); nullopt when the suffix is not a
/// positive integer.
std::optional<std::pair<std::string, int>> split_name(std::string_view name);

}  // namespace envforge::house
