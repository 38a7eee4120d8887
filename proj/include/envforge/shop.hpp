#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// A miniature WebShop: a seeded clothing catalog behind search, paginated
// results, detail pages with option selection, and a single purchase.
namespace envforge::shop {

struct Product {
    std::string asin;  // 10 characters, "B0" prefix
    std::string title;
    std::set<std::string> attributes;
    std::map<std::string, std::vector<std::string>> options;  // e.g. color, size
    double price_low = 0.0;
    double price_high = 0.0;

    bool operator==(const Product&) const = default;
};

struct Goal {
    std::set<std::string> required_attributes;
    std::map<std::string, std::string> required_options;
    double price_cap = 0.0;
    std::string noun;  // product noun used in the instruction text

    bool operator==(const Goal&) const = default;
};

struct Catalog {
    std::vector<Product> products;  // sorted by asin
    Goal goal;

    const Product* find(std::string_view asin) const;
};

inline constexpr int kResultsPerPage = 10;
inline constexpr int kMaxGenerationAttempts = 100;

/// Throws std::invalid_argument for n_products < 10 and
/// Error(InfeasibleGoal) when no satisfiable goal was found.
Catalog generate_catalog(std::uint64_t seed, int n_products);

/// "Find me slim fit shirt with color: black, and size: small, and price
/// lower than 30.00 dollars"
std::string goal_instruction(const Goal& goal);

/// Lowercased alphanumeric tokens.
std::set<std::string> tokenize(std::string_view text);

/// Permutation of the catalog: token-overlap score descending, asin
/// ascending.
std::vector<std::string> search(const Catalog& catalog, std::string_view query);

bool goal_satisfied(const Product& product, const std::map<std::string, std::string>& selected,
                    double paid_price, const Goal& goal);

/// Satisfying products (brute-force scan, paid price = low end).
std::vector<const Product*> satisfying_products(const Catalog& catalog);

enum class PageKind { search, results, detail };

struct Page {
    PageKind kind = PageKind::search;
    std::optional<std::string> query;
    int page_index = 1;
    std::vector<std::string> visible_asins;
    std::map<std::string, std::string> selected_options;
    std::optional<std::string> focused_asin;

    bool operator==(const Page&) const = default;
};

struct Purchase {
    std::string asin;
    std::map<std::string, std::string> options;
    double paid_price = 0.0;
    bool success = false;
};

struct State {
    std::shared_ptr<const Catalog> catalog;
    Page page;
    std::optional<Purchase> purchase;  // set once "click[buy now]" was accepted
};

State initial_state(std::shared_ptr<const Catalog> catalog);

int page_count(const Catalog& catalog);

struct StepResult {
    State state;
    bool accepted = false;
};

/// Actions are matched case-insensitively after trimming. Forms:
/// search[<query>], click[back to search], click[next >], click[< prev],
/// click[<asin>], click[<option value>], click[buy now].
StepResult step(const State& s, std::string_view action);

/// Lowercase click targets for the current page; the search page offers the
/// template "search[<query>]".
std::vector<std::string> admissible(const State& s);

inline constexpr std::string_view kSearchTemplate = "search[<query>]";

/// "[SEP]"-joined page text.
std::string render(const State& s);

std::string format_price(double low, double high);

std::uint64_t state_hash(const State& s);

/// Ground-truth scripted shopper; nullopt after the purchase.
std::optional<std::string> greedy_action(const State& s);

/// Catalog as JSON text {products:[...], goal:{...}}.
std::string catalog_to_json(const Catalog& catalog);

}  // namespace envforge::shop
