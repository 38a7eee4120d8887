#include "envforge/shop.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "envforge/core.hpp"
#include "envforge/error.hpp"
#include "envforge/rng.hpp"

namespace envforge::shop {

namespace {

constexpr std::array<std::string_view, 10> kBrands{
    "JSPOYOU", "HAUKLIE", "WENKOMG1", "ZHDD",     "XXBR",
    "Amazon Essentials", "InterestPrint", "Northwind", "Bluecrest", "Lumora",
};
constexpr std::array<std::string_view, 2> kAudiences{"Men's", "Women's"};
constexpr std::array<std::string_view, 14> kNouns{
    "shirt", "t-shirt", "polo shirt", "henley",  "sweatshirt", "jacket", "jeans",
    "shorts", "pants",  "joggers",    "skirt",   "vest",       "blazer", "leggings",
};
constexpr std::array<std::string_view, 18> kAttributes{
    "slim fit",       "loose fit",       "regular fit", "long sleeve",  "short sleeve",
    "contrast color", "classic fit",     "machine wash", "hand wash",   "button closure",
    "elastic waist",  "quick dry",       "moisture wicking", "cotton",  "polyester",
    "stretch fabric", "relaxed fit",     "high waist",
};
constexpr std::array<std::string_view, 12> kColors{
    "black", "white", "navy", "gray", "red", "blue",
    "green", "beige", "yellow", "pink", "brown", "olive",
};
constexpr std::array<std::string_view, 6> kSizes{
    "x-small", "small", "medium", "large", "x-large", "xx-large",
};
constexpr std::string_view kAsinAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string title_case(std::string_view s) {
    std::string out(s);
    bool start = true;
    for (auto& c : out) {
        if (start && std::isalpha(static_cast<unsigned char>(c))) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        start = c == ' ' || c == '-';
    }
    return out;
}

std::string money(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

double cents(Rng& rng, int lo_dollars, int hi_dollars) {
    return static_cast<double>(rng.between(lo_dollars * 100, hi_dollars * 100)) / 100.0;
}

template <std::size_t N>
std::vector<std::string> sample_distinct(Rng& rng, const std::array<std::string_view, N>& pool,
                                         std::size_t k) {
    std::vector<std::string> all(pool.begin(), pool.end());
    rng.shuffle(all);
    all.resize(std::min(k, all.size()));
    return all;
}

Product make_product(Rng& rng, std::set<std::string>& used_asins) {
    Product p;
    do {
        p.asin = "B0";
        for (int i = 0; i < 8; ++i) {
            p.asin += kAsinAlphabet[rng.below(kAsinAlphabet.size())];
        }
    } while (!used_asins.insert(p.asin).second);

    const auto attrs = sample_distinct(rng, kAttributes, 2 + rng.below(3));
    p.attributes.insert(attrs.begin(), attrs.end());
    const std::string_view brand = kBrands[rng.below(kBrands.size())];
    const std::string_view audience = kAudiences[rng.below(kAudiences.size())];
    const std::string_view noun = kNouns[rng.below(kNouns.size())];
    p.title = std::string(brand) + " " + std::string(audience);
    const std::size_t in_title = 1 + rng.below(std::min<std::size_t>(2, attrs.size()));
    for (std::size_t i = 0; i < in_title; ++i) {
        p.title += " " + title_case(attrs[i]);
    }
    p.title += " " + title_case(noun);

    auto colors = sample_distinct(rng, kColors, 2 + rng.below(4));
    std::sort(colors.begin(), colors.end());
    p.options["color"] = colors;
    const std::size_t n_sizes = 3 + rng.below(4);
    const std::size_t first = rng.below(kSizes.size() - n_sizes + 1);
    for (std::size_t i = first; i < first + n_sizes; ++i) {
        p.options["size"].emplace_back(kSizes[i]);
    }

    p.price_low = cents(rng, 3, 60);
    p.price_high = rng.bernoulli(0.4) ? p.price_low : p.price_low + cents(rng, 1, 20);
    return p;
}

// Longest vocabulary noun the title ends with ("polo shirt" over "shirt").
std::string noun_of(const Product& p) {
    std::string best = "item";
    std::size_t best_len = 0;
    for (auto noun : kNouns) {
        const std::string suffix = " " + title_case(noun);
        if (p.title.size() >= suffix.size() && suffix.size() > best_len &&
            p.title.compare(p.title.size() - suffix.size(), suffix.size(), suffix) == 0) {
            best = std::string(noun);
            best_len = suffix.size();
        }
    }
    return best;
}

std::vector<std::string> page_slice(const Catalog& catalog, const std::string& query, int page) {
    const auto ranked = search(catalog, query);
    const auto begin = static_cast<std::size_t>((page - 1) * kResultsPerPage);
    const auto end = std::min(ranked.size(), begin + kResultsPerPage);
    return {ranked.begin() + static_cast<std::ptrdiff_t>(begin),
            ranked.begin() + static_cast<std::ptrdiff_t>(end)};
}

// Single-quoted page segment.
std::string sq(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string join_sep(const std::vector<std::string>& segments) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i > 0) {
            out += " [SEP] ";
        }
        out += segments[i];
    }
    return out;
}

}  // namespace

const Product* Catalog::find(std::string_view asin) const {
    const auto it = std::lower_bound(products.begin(), products.end(), asin,
                                     [](const Product& p, std::string_view a) { return p.asin < a; });
    return it != products.end() && it->asin == asin ? &*it : nullptr;
}

std::string format_price(double low, double high) {
    if (low == high) {
        return "$" + money(low);
    }
    return "$" + money(low) + " to $" + money(high);
}

Catalog generate_catalog(std::uint64_t seed, int n_products) {
    if (n_products < 10) {
        throw std::invalid_argument("generate_catalog needs at least 10 products");
    }
    Rng rng(derive_seed(seed, 0x5407ULL));
    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        Catalog catalog;
        std::set<std::string> used;
        for (int i = 0; i < n_products; ++i) {
            catalog.products.push_back(make_product(rng, used));
        }
        const Product& planted = catalog.products[rng.below(catalog.products.size())];
        std::vector<std::string> attrs(planted.attributes.begin(), planted.attributes.end());
        rng.shuffle(attrs);
        attrs.resize(1 + rng.below(std::min<std::size_t>(2, attrs.size())));
        catalog.goal.required_attributes.insert(attrs.begin(), attrs.end());
        for (const auto& [name, values] : planted.options) {
            catalog.goal.required_options[name] = values[rng.below(values.size())];
        }
        catalog.goal.price_cap = std::ceil(planted.price_low) + static_cast<double>(rng.below(16));
        catalog.goal.noun = noun_of(planted);

        std::sort(catalog.products.begin(), catalog.products.end(),
                  [](const Product& a, const Product& b) { return a.asin < b.asin; });
        if (!satisfying_products(catalog).empty()) {
            return catalog;
        }
    }
    throw Error(ErrorCode::InfeasibleGoal, "no satisfiable shopping goal");
}

std::string goal_instruction(const Goal& goal) {
    std::string out = "Find me ";
    std::size_t i = 0;
    for (const auto& attr : goal.required_attributes) {
        out += attr;
        out += ++i < goal.required_attributes.size() ? ", " : " ";
    }
    out += goal.noun;
    bool first = true;
    for (const auto& [name, value] : goal.required_options) {
        out += (first ? " with " : ", and ") + name + ": " + value;
        first = false;
    }
    out += ", and price lower than " + money(goal.price_cap) + " dollars";
    return out;
}

std::set<std::string> tokenize(std::string_view text) {
    std::set<std::string> tokens;
    std::string current;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            current += static_cast<char>(std::tolower(u));
        } else if (!current.empty()) {
            tokens.insert(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.insert(std::move(current));
    }
    return tokens;
}

std::vector<std::string> search(const Catalog& catalog, std::string_view query) {
    const auto q = tokenize(query);
    std::vector<std::pair<std::size_t, const Product*>> scored;
    scored.reserve(catalog.products.size());
    for (const auto& p : catalog.products) {
        auto tokens = tokenize(p.title);
        for (const auto& a : p.attributes) {
            const auto at = tokenize(a);
            tokens.insert(at.begin(), at.end());
        }
        std::size_t score = 0;
        for (const auto& t : q) {
            score += tokens.count(t);
        }
        scored.emplace_back(score, &p);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second->asin < b.second->asin;
    });
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (const auto& [score, p] : scored) {
        out.push_back(p->asin);
    }
    return out;
}

bool goal_satisfied(const Product& product, const std::map<std::string, std::string>& selected,
                    double paid_price, const Goal& goal) {
    for (const auto& attr : goal.required_attributes) {
        if (!product.attributes.count(attr)) {
            return false;
        }
    }
    for (const auto& [name, value] : goal.required_options) {
        const auto it = selected.find(name);
        if (it == selected.end() || it->second != value) {
            return false;
        }
    }
    return paid_price <= goal.price_cap;
}

std::vector<const Product*> satisfying_products(const Catalog& catalog) {
    std::vector<const Product*> out;
    for (const auto& p : catalog.products) {
        bool options_offered = true;
        for (const auto& [name, value] : catalog.goal.required_options) {
            const auto it = p.options.find(name);
            if (it == p.options.end() ||
                std::find(it->second.begin(), it->second.end(), value) == it->second.end()) {
                options_offered = false;
            }
        }
        if (options_offered &&
            goal_satisfied(p, catalog.goal.required_options, p.price_low, catalog.goal)) {
            out.push_back(&p);
        }
    }
    return out;
}

int page_count(const Catalog& catalog) {
    const int n = static_cast<int>(catalog.products.size());
    return (n + kResultsPerPage - 1) / kResultsPerPage;
}

State initial_state(std::shared_ptr<const Catalog> catalog) {
    State s;
    s.catalog = std::move(catalog);
    return s;
}

StepResult step(const State& s, std::string_view raw_action) {
    if (s.purchase) {
        return {s, false};
    }
    const std::string action = lower(trim(raw_action));
    const Catalog& catalog = *s.catalog;
    State next = s;
    Page& page = next.page;

    auto open_results = [&](std::string query, int index) {
        page = Page{};
        page.kind = PageKind::results;
        page.query = std::move(query);
        page.page_index = index;
        page.visible_asins = page_slice(catalog, *page.query, index);
    };

    const bool is_search = action.size() > 8 && action.starts_with("search[") && action.back() == ']';
    if (is_search) {
        const std::string query = trim(std::string_view(action).substr(7, action.size() - 8));
        if (s.page.kind != PageKind::search || query.empty()) {
            return {s, false};
        }
        open_results(query, 1);
        return {std::move(next), true};
    }
    if (!(action.starts_with("click[") && action.back() == ']')) {
        return {s, false};
    }
    const std::string target = trim(std::string_view(action).substr(6, action.size() - 7));

    switch (s.page.kind) {
        case PageKind::search:
            return {s, false};
        case PageKind::results: {
            if (target == "back to search") {
                page = Page{};
                return {std::move(next), true};
            }
            if (target == "next >") {
                if (s.page.page_index >= page_count(catalog)) {
                    return {s, false};
                }
                open_results(*s.page.query, s.page.page_index + 1);
                return {std::move(next), true};
            }
            if (target == "< prev") {
                if (s.page.page_index <= 1) {
                    return {s, false};
                }
                open_results(*s.page.query, s.page.page_index - 1);
                return {std::move(next), true};
            }
            for (const auto& asin : s.page.visible_asins) {
                if (lower(asin) == target) {
                    page.kind = PageKind::detail;
                    page.focused_asin = asin;
                    page.selected_options.clear();
                    return {std::move(next), true};
                }
            }
            return {s, false};
        }
        case PageKind::detail: {
            const Product& product = *catalog.find(*s.page.focused_asin);
            if (target == "back to search") {
                page = Page{};
                return {std::move(next), true};
            }
            if (target == "< prev") {
                open_results(*s.page.query, s.page.page_index);
                return {std::move(next), true};
            }
            if (target == "buy now") {
                Purchase purchase;
                purchase.asin = product.asin;
                purchase.options = s.page.selected_options;
                purchase.paid_price = product.price_low;
                purchase.success =
                    goal_satisfied(product, purchase.options, purchase.paid_price, catalog.goal);
                next.purchase = std::move(purchase);
                return {std::move(next), true};
            }
            for (const auto& [name, values] : product.options) {
                if (std::find(values.begin(), values.end(), target) != values.end()) {
                    page.selected_options[name] = target;
                    return {std::move(next), true};
                }
            }
            return {s, false};
        }
    }
    return {s, false};
}

std::vector<std::string> admissible(const State& s) {
    if (s.purchase) {
        return {};
    }
    std::vector<std::string> out;
    switch (s.page.kind) {
        case PageKind::search:
            out.emplace_back(kSearchTemplate);
            break;
        case PageKind::results:
            out.emplace_back("click[back to search]");
            if (s.page.page_index < page_count(*s.catalog)) {
                out.emplace_back("click[next >]");
            }
            if (s.page.page_index > 1) {
                out.emplace_back("click[< prev]");
            }
            for (const auto& asin : s.page.visible_asins) {
                out.push_back("click[" + lower(asin) + "]");
            }
            break;
        case PageKind::detail: {
            out.emplace_back("click[back to search]");
            out.emplace_back("click[< prev]");
            const Product& product = *s.catalog->find(*s.page.focused_asin);
            for (const auto& [name, values] : product.options) {
                for (const auto& v : values) {
                    out.push_back("click[" + v + "]");
                }
            }
            out.emplace_back("click[buy now]");
            break;
        }
    }
    return out;
}

std::string render(const State& s) {
    std::vector<std::string> segments;
    switch (s.page.kind) {
        case PageKind::search:
            segments.push_back(sq("Search"));
            break;
        case PageKind::results: {
            segments.push_back(sq("Back to Search"));
            segments.push_back(sq("Page " + std::to_string(s.page.page_index) +
                                      " (Total results: " +
                                      std::to_string(s.catalog->products.size()) + ")"));
            if (s.page.page_index > 1) {
                segments.push_back(sq("< Prev"));
            }
            if (s.page.page_index < page_count(*s.catalog)) {
                segments.push_back(sq("Next >"));
            }
            for (const auto& asin : s.page.visible_asins) {
                const Product& p = *s.catalog->find(asin);
                segments.push_back(sq(p.asin));
                segments.push_back(sq(p.title));
                segments.push_back(sq(format_price(p.price_low, p.price_high)));
            }
            break;
        }
        case PageKind::detail: {
            const Product& p = *s.catalog->find(*s.page.focused_asin);
            segments.push_back(sq("Back to Search"));
            segments.push_back(sq("< Prev"));
            for (const auto& [name, values] : p.options) {
                segments.push_back(sq(name));
                for (const auto& v : values) {
                    segments.push_back(sq(v));
                }
            }
            segments.push_back(sq(p.title));
            segments.push_back(sq("Price: " + format_price(p.price_low, p.price_high)));
            segments.push_back(sq("Rating: N.A."));
            segments.push_back(sq("Description"));
            segments.push_back(sq("Features"));
            segments.push_back(sq("Reviews"));
            segments.push_back(sq("Buy Now"));
            break;
        }
    }
    return join_sep(segments);
}

std::uint64_t state_hash(const State& s) {
    std::string canon = std::to_string(static_cast<int>(s.page.kind)) + '|' +
                        s.page.query.value_or("") + '|' + std::to_string(s.page.page_index) + '|' +
                        s.page.focused_asin.value_or("") + '|';
    for (const auto& a : s.page.visible_asins) {
        canon += a + ',';
    }
    for (const auto& [k, v] : s.page.selected_options) {
        canon += k + '=' + v + ',';
    }
    if (s.purchase) {
        canon += "#" + s.purchase->asin + (s.purchase->success ? "+" : "-");
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::optional<std::string> greedy_action(const State& s) {
    if (s.purchase) {
        return std::nullopt;
    }
    const auto satisfying = satisfying_products(*s.catalog);
    if (satisfying.empty()) {
        return std::nullopt;
    }
    const Product& want = *satisfying.front();
    switch (s.page.kind) {
        case PageKind::search:
            return "search[" + want.title + "]";
        case PageKind::results: {
            for (const auto& asin : s.page.visible_asins) {
                if (asin == want.asin) {
                    return "click[" + lower(asin) + "]";
                }
            }
            if (s.page.page_index < page_count(*s.catalog)) {
                return std::string("click[next >]");
            }
            return std::string("click[back to search]");
        }
        case PageKind::detail: {
            if (*s.page.focused_asin != want.asin) {
                return std::string("click[< prev]");
            }
            for (const auto& [name, value] : s.catalog->goal.required_options) {
                const auto it = s.page.selected_options.find(name);
                if (it == s.page.selected_options.end() || it->second != value) {
                    return "click[" + value + "]";
                }
            }
            return std::string("click[buy now]");
        }
    }
    return std::nullopt;
}

std::string catalog_to_json(const Catalog& catalog) {
    nlohmann::ordered_json products = nlohmann::ordered_json::array();
    for (const auto& p : catalog.products) {
        nlohmann::ordered_json options = nlohmann::ordered_json::object();
        for (const auto& [name, values] : p.options) {
            options[name] = values;
        }
        products.push_back({{"asin", p.asin},
                            {"title", p.title},
                            {"attributes", p.attributes},
                            {"options", options},
                            {"price_range", {p.price_low, p.price_high}}});
    }
    nlohmann::ordered_json required_options = nlohmann::ordered_json::object();
    for (const auto& [name, value] : catalog.goal.required_options) {
        required_options[name] = value;
    }
    nlohmann::ordered_json doc = {
        {"products", products},
        {"goal",
         {{"instruction", goal_instruction(catalog.goal)},
          {"required_attributes", catalog.goal.required_attributes},
          {"required_options", required_options},
          {"price_cap", catalog.goal.price_cap}}},
    };
    return doc.dump(2);
}

}  // namespace envforge::shop
