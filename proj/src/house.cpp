#include "envforge/house.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <stdexcept>

#include "envforge/error.hpp"
#include "envforge/rng.hpp"

namespace envforge::house {

namespace {

struct ReceptacleKind {
    std::string_view type;
    bool openable;
};

constexpr std::array<ReceptacleKind, 13> kReceptacleKinds{{
    {"cabinet", true},
    {"coffeemachine", false},
    {"countertop", false},
    {"diningtable", false},
    {"drawer", true},
    {"fridge", true},
    {"garbagecan", false},
    {"microwave", true},
    {"safe", true},
    {"shelf", false},
    {"sinkbasin", false},
    {"stoveburner", false},
    {"toaster", false},
}};

constexpr std::array<std::string_view, 18> kObjectTypes{
    "apple", "bowl", "bread",  "butterknife", "cup",  "egg",
    "fork",  "keychain", "knife", "lettuce", "mug",  "pan",
    "pen",   "plate", "potato", "spatula", "spoon", "tomato",
};

// Appliances never serve as task targets.
bool can_be_target(std::string_view type) {
    return type != "coffeemachine" && type != "stoveburner" && type != "toaster";
}

std::string type_of(std::string_view name) {
    const auto parts = split_name(name);
    return parts ? parts->first : std::string(name);
}

std::string join_listing(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out += names.size() > 1 && i + 1 == names.size() ? ", and " : ", ";
        }
        out += "a " + names[i];
    }
    return out;
}

Receptacle* find_mut(State& s, std::string_view name) {
    for (auto& r : s.receptacles) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

// Receptacle of the target type holding the most task objects; the first in
// roster order wins ties.
const Receptacle* target_instance(const State& s) {
    const Receptacle* best = nullptr;
    long best_count = -1;
    for (const auto& r : s.receptacles) {
        if (type_of(r.name) != s.task.target_receptacle) {
            continue;
        }
        const auto count = std::count_if(r.contents.begin(), r.contents.end(), [&](const auto& o) {
            return s.objects.at(o).type == s.task.object_type;
        });
        if (count > best_count) {
            best = &r;
            best_count = count;
        }
    }
    return best;
}

}  // namespace

std::optional<std::pair<std::string, int>> split_name(std::string_view name) {
    const auto space = name.rfind(' ');
    if (space == std::string_view::npos || space == 0 || space + 1 == name.size()) {
        return std::nullopt;
    }
    int id = 0;
    const auto digits = name.substr(space + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || id <= 0) {
        return std::nullopt;
    }
    return std::pair{std::string(name.substr(0, space)), id};
}

const Receptacle* State::find_receptacle(std::string_view name) const {
    for (const auto& r : receptacles) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

State generate(std::uint64_t seed, const GenerateOptions& options) {
    if (options.n_receptacles < 2 || options.n_objects < 1) {
        throw std::invalid_argument("house::generate needs >= 2 receptacles and >= 1 object");
    }
    Rng rng(derive_seed(seed, 0x40a5eULL));
    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        State s;
        std::map<std::string, int> per_type;
        for (int i = 0; i < options.n_receptacles; ++i) {
            const auto& kind = kReceptacleKinds[rng.below(kReceptacleKinds.size())];
            const int id = ++per_type[std::string(kind.type)];
            s.receptacles.push_back(
                {std::string(kind.type) + " " + std::to_string(id), kind.openable, false, {}});
        }
        // Listing order: type ascending, id descending.
        std::sort(s.receptacles.begin(), s.receptacles.end(), [](const auto& a, const auto& b) {
            const auto pa = *split_name(a.name);
            const auto pb = *split_name(b.name);
            return pa.first != pb.first ? pa.first < pb.first : pa.second > pb.second;
        });

        std::vector<std::string> target_types;
        for (const auto& [type, count] : per_type) {
            if (can_be_target(type)) {
                target_types.push_back(type);
            }
        }
        if (per_type.size() < 2 || target_types.empty()) {
            continue;
        }

        std::map<std::string, int> object_counts;
        std::vector<std::string> object_list;
        for (int i = 0; i < options.n_objects; ++i) {
            const std::string type(kObjectTypes[rng.below(kObjectTypes.size())]);
            object_list.push_back(type + " " + std::to_string(++object_counts[type]));
        }

        const TaskKind kind =
            options.kind.value_or(rng.bernoulli(0.5) ? TaskKind::put_two : TaskKind::put_one);
        const int needed = kind == TaskKind::put_two ? 2 : 1;
        std::vector<std::string> candidates;
        for (const auto& [type, count] : object_counts) {
            if (count >= needed) {
                candidates.push_back(type);
            }
        }
        if (candidates.empty()) {
            continue;
        }
        s.task.kind = kind;
        s.task.object_type = candidates[rng.below(candidates.size())];
        s.task.target_receptacle = target_types[rng.below(target_types.size())];

        std::vector<std::size_t> sources;
        for (std::size_t i = 0; i < s.receptacles.size(); ++i) {
            if (type_of(s.receptacles[i].name) != s.task.target_receptacle) {
                sources.push_back(i);
            }
        }
        for (const auto& name : object_list) {
            const auto type = type_of(name);
            // Task objects never start inside a target receptacle.
            const std::size_t idx = type == s.task.object_type
                                        ? sources[rng.below(sources.size())]
                                        : rng.below(s.receptacles.size());
            s.receptacles[idx].contents.push_back(name);
            s.objects[name] = Object{type, s.receptacles[idx].name};
        }
        return s;
    }
    throw Error(ErrorCode::InfeasibleTask,
                "no satisfiable household task after " +
                    std::to_string(kMaxGenerationAttempts) + " attempts");
}

State generate(std::uint64_t seed, int n_receptacles, int n_objects) {
    return generate(seed, GenerateOptions{n_receptacles, n_objects, std::nullopt});
}

std::string task_description(const TaskSpec& task) {
    if (task.kind == TaskKind::put_two) {
        return "find two " + task.object_type + " and put them in " + task.target_receptacle;
    }
    return "put a " + task.object_type + " in " + task.target_receptacle;
}

std::vector<std::string> admissible(const State& s) {
    std::set<std::string> actions{"inventory", "look"};
    for (const auto& r : s.receptacles) {
        actions.insert("go to " + r.name);
    }
    if (const Receptacle* here = s.find_receptacle(s.agent_at)) {
        if (here->openable) {
            actions.insert((here->open ? "close " : "open ") + here->name);
        }
        if (here->visible_inside()) {
            if (s.inventory.empty()) {
                for (const auto& o : here->contents) {
                    actions.insert("take " + o + " from " + here->name);
                }
            } else {
                actions.insert("put " + s.inventory.front() + " in/on " + here->name);
            }
        }
    }
    return {actions.begin(), actions.end()};
}

StepResult step(const State& s, std::string_view action) {
    const auto allowed = admissible(s);
    if (!std::binary_search(allowed.begin(), allowed.end(), action)) {
        return {s, false};
    }
    State next = s;
    auto starts = [&](std::string_view prefix) { return action.substr(0, prefix.size()) == prefix; };

    if (action == "inventory") {
        next.feedback = s.inventory.empty() ? "You are not carrying anything."
                                            : "You are carrying: a " + s.inventory.front() + ".";
    } else if (action == "look") {
        next.feedback = "You look around.";
    } else if (starts("go to ")) {
        next.agent_at = std::string(action.substr(6));
        next.feedback = "You arrive at " + next.agent_at + ".";
    } else if (starts("open ") || starts("close ")) {
        const bool opening = starts("open ");
        Receptacle* r = find_mut(next, next.agent_at);
        r->open = opening;
        next.feedback = (opening ? "You open the " : "You close the ") + r->name + ".";
    } else if (starts("take ")) {
        const auto rest = action.substr(5);
        const auto from = rest.find(" from ");
        const std::string object(rest.substr(0, from));
        Receptacle* r = find_mut(next, next.agent_at);
        r->contents.erase(std::find(r->contents.begin(), r->contents.end(), object));
        next.inventory.push_back(object);
        next.objects[object].location = std::string(kInventory);
        next.feedback = "You pick up the " + object + " from the " + r->name + ".";
    } else if (starts("put ")) {
        const std::string object = next.inventory.front();
        Receptacle* r = find_mut(next, next.agent_at);
        next.inventory.clear();
        r->contents.push_back(object);
        next.objects[object].location = r->name;
        next.feedback = "You put the " + object + " in/on the " + r->name + ".";
    }
    return {std::move(next), true};
}

bool task_complete(const State& s) {
    const int needed = s.task.kind == TaskKind::put_two ? 2 : 1;
    for (const auto& r : s.receptacles) {
        if (type_of(r.name) != s.task.target_receptacle) {
            continue;
        }
        const auto count = std::count_if(r.contents.begin(), r.contents.end(), [&](const auto& o) {
            return s.objects.at(o).type == s.task.object_type;
        });
        if (count >= needed) {
            return true;
        }
    }
    return false;
}

std::string render(const State& s) {
    std::vector<std::string> sentences;
    if (!s.feedback.empty()) {
        sentences.push_back(s.feedback);
    }
    const Receptacle* here = s.find_receptacle(s.agent_at);
    sentences.push_back(here ? "You are at " + here->name + "."
                             : std::string("You are in the middle of a room."));
    std::vector<std::string> names;
    for (const auto& r : s.receptacles) {
        names.push_back(r.name);
    }
    sentences.push_back("Looking quickly around you, you see " + join_listing(names) + ".");
    if (here) {
        const std::string contents =
            here->contents.empty() ? std::string("nothing") : join_listing(here->contents);
        if (!here->openable) {
            sentences.push_back("On the " + here->name + ", you see " + contents + ".");
        } else if (!here->open) {
            sentences.push_back("The " + here->name + " is closed.");
        } else {
            sentences.push_back("The " + here->name + " is open.");
            sentences.push_back("In it, you see " + contents + ".");
        }
    }
    if (!s.inventory.empty()) {
        sentences.push_back("You are carrying: a " + s.inventory.front() + ".");
    }

    std::string out = "-= Welcome to TextWorld, ALFRED! =-\n\n";
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += sentences[i];
    }
    out += "\n\nYour task is to: " + task_description(s.task) +
           ". Your admissible actions of the current situation are: [";
    const auto actions = admissible(s);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += "'" + actions[i] + "'";
    }
    out += "].";
    return out;
}

std::vector<std::string> object_names(const State& s) {
    std::vector<std::string> names;
    for (const auto& [name, object] : s.objects) {
        names.push_back(name);
    }
    return names;
}

std::optional<std::string> greedy_action(const State& s) {
    if (task_complete(s)) {
        return std::nullopt;
    }
    const Receptacle* here = s.find_receptacle(s.agent_at);
    const bool holding_task_object =
        !s.inventory.empty() && s.objects.at(s.inventory.front()).type == s.task.object_type;

    if (holding_task_object) {
        const Receptacle* target = target_instance(s);
        if (here != target) {
            return "go to " + target->name;
        }
        if (!target->visible_inside()) {
            return "open " + target->name;
        }
        return "put " + s.inventory.front() + " in/on " + target->name;
    }

    if (!s.inventory.empty()) {
        // Holding something unrelated: set it down where we stand.
        if (here && here->visible_inside()) {
            return "put " + s.inventory.front() + " in/on " + here->name;
        }
        if (here) {
            return "open " + here->name;
        }
        return "go to " + s.receptacles.front().name;
    }

    const Receptacle* target = target_instance(s);
    for (const auto& [name, object] : s.objects) {
        if (object.type != s.task.object_type || object.location == target->name) {
            continue;
        }
        const Receptacle* source = s.find_receptacle(object.location);
        if (here != source) {
            return "go to " + source->name;
        }
        if (!source->visible_inside()) {
            return "open " + source->name;
        }
        return "take " + name + " from " + source->name;
    }
    return std::nullopt;
}

std::uint64_t state_hash(const State& s) {
    std::string canon;
    for (const auto& r : s.receptacles) {
        canon += r.name + '|' + (r.openable ? '1' : '0') + (r.open ? '1' : '0');
        for (const auto& o : r.contents) {
            canon += ',' + o;
        }
        canon += ';';
    }
    for (const auto& [name, object] : s.objects) {
        canon += name + '@' + object.location + ';';
    }
    canon += s.agent_at + '#';
    for (const auto& o : s.inventory) {
        canon += o + ',';
    }
    canon += task_description(s.task) + '#' + s.feedback;

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace envforge::house
