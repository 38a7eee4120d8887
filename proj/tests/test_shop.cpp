#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <json.hpp>

#include "envforge/error.hpp"
#include "envforge/shop.hpp"

using namespace envforge;
using namespace envforge::shop;

namespace {

std::shared_ptr<const Catalog> catalog_for(std::uint64_t seed, int n = 50) {
    return std::make_shared<const Catalog>(generate_catalog(seed, n));
}

State must_step(const State& s, const std::string& action) {
    auto r = step(s, action);
    EXPECT_TRUE(r.accepted) << action;
    return r.state;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Walks to the detail page of `asin` from the search page via its title.
State open_detail(const State& start, const Product& p) {
    State s = must_step(start, "search[" + p.title + "]");
    while (std::find(s.page.visible_asins.begin(), s.page.visible_asins.end(), p.asin) ==
           s.page.visible_asins.end()) {
        s = must_step(s, "click[next >]");
    }
    return must_step(s, "click[" + lower(p.asin) + "]");
}

// Independent ranking oracle: overlap count, then asin.
std::vector<std::string> oracle_search(const Catalog& c, const std::string& query) {
    auto toks = [](const std::string& text) {
        std::set<std::string> out;
        std::string cur;
        for (char ch : text + " ") {
            if (std::isalnum(static_cast<unsigned char>(ch))) {
                cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            } else if (!cur.empty()) {
                out.insert(cur);
                cur.clear();
            }
        }
        return out;
    };
    const auto q = toks(query);
    std::vector<std::pair<int, std::string>> scored;
    for (const auto& p : c.products) {
        std::string all = p.title;
        for (const auto& a : p.attributes) all += " " + a;
        const auto t = toks(all);
        int score = 0;
        for (const auto& w : q) score += t.count(w) ? 1 : 0;
        scored.emplace_back(-score, p.asin);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> out;
    for (const auto& [s, a] : scored) out.push_back(a);
    return out;
}

}  // namespace

TEST(ShopCatalog, DeterministicInSeed) {
    const auto a = generate_catalog(4, 50);
    const auto b = generate_catalog(4, 50);
    EXPECT_EQ(a.products, b.products);
    EXPECT_EQ(a.goal, b.goal);
    EXPECT_EQ(catalog_to_json(a), catalog_to_json(b));
}

TEST(ShopCatalog, GoalAlwaysSatisfiableByBruteForce) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto c = generate_catalog(seed, 50);
        EXPECT_GT(c.goal.price_cap, 0.0);
        bool found = false;
        for (const auto& p : c.products) {
            bool ok = p.price_low <= c.goal.price_cap;
            for (const auto& a : c.goal.required_attributes) ok = ok && p.attributes.count(a);
            for (const auto& [name, value] : c.goal.required_options) {
                const auto it = p.options.find(name);
                ok = ok && it != p.options.end() &&
                     std::find(it->second.begin(), it->second.end(), value) != it->second.end();
            }
            found = found || ok;
        }
        EXPECT_TRUE(found) << "seed " << seed;
    }
}

TEST(ShopCatalog, ProductInvariants) {
    const auto c = generate_catalog(9, 50);
    ASSERT_EQ(c.products.size(), 50u);
    std::set<std::string> asins;
    for (const auto& p : c.products) {
        EXPECT_EQ(p.asin.size(), 10u);
        EXPECT_EQ(p.asin.substr(0, 2), "B0");
        EXPECT_LE(p.price_low, p.price_high);
        EXPECT_TRUE(asins.insert(p.asin).second);
    }
    EXPECT_TRUE(std::is_sorted(c.products.begin(), c.products.end(),
                               [](const Product& a, const Product& b) { return a.asin < b.asin; }));
}

TEST(ShopCatalog, TooSmallRejected) {
    EXPECT_THROW(generate_catalog(0, 9), std::invalid_argument);
}

TEST(ShopCatalog, PageCount) {
    EXPECT_EQ(page_count(generate_catalog(0, 50)), 5);
    EXPECT_EQ(page_count(generate_catalog(0, 51)), 6);
}

TEST(ShopCatalog, ExportsJson) {
    const auto j = nlohmann::json::parse(catalog_to_json(generate_catalog(2, 20)));
    EXPECT_EQ(j.at("products").size(), 20u);
    EXPECT_TRUE(j.at("goal").contains("price_cap"));
    EXPECT_EQ(j.at("goal").at("instruction").get<std::string>().substr(0, 8), "Find me ");
}

TEST(ShopGoal, InstructionWording) {
    Goal g;
    g.required_attributes = {"slim fit"};
    g.required_options = {{"color", "black"}, {"size", "small"}};
    g.price_cap = 30.0;
    g.noun = "shirt";
    EXPECT_EQ(goal_instruction(g),
              "Find me slim fit shirt with color: black, and size: small, and price lower than 30.00 dollars");
}

TEST(ShopSearch, MatchesIndependentRanking) {
    const auto c = generate_catalog(5, 50);
    for (const std::string& q : std::vector<std::string>{"slim fit shirt", "Women's Cotton", "zzz qqq", c.products[7].title}) {
        EXPECT_EQ(search(c, q), oracle_search(c, q)) << q;
    }
}

TEST(ShopSearch, ZeroOverlapIsAsinOrder) {
    const auto c = generate_catalog(5, 50);
    const auto ranked = search(c, "qwertyuiop");
    EXPECT_TRUE(std::is_sorted(ranked.begin(), ranked.end()));
    EXPECT_EQ(ranked.size(), c.products.size());
}

TEST(ShopSearch, FullTitleRanksFirstAmongTies) {
    const auto c = generate_catalog(6, 50);
    for (const auto& p : c.products) {
        const auto ranked = search(c, p.title);
        const auto pos = std::find(ranked.begin(), ranked.end(), p.asin) - ranked.begin();
        // Everything ahead must have the same maximal overlap and a smaller asin.
        const auto oracle = oracle_search(c, p.title);
        EXPECT_EQ(ranked, oracle);
        for (long i = 0; i < pos; ++i) {
            EXPECT_LT(ranked[static_cast<std::size_t>(i)], p.asin);
        }
    }
}

TEST(ShopStep, BuyingPlantedProductSucceeds) {
    const auto cat = catalog_for(1);
    const Product& want = *satisfying_products(*cat).front();
    State s = open_detail(initial_state(cat), want);
    for (const auto& [name, value] : cat->goal.required_options) {
        s = must_step(s, "click[" + value + "]");
    }
    s = must_step(s, "click[buy now]");
    ASSERT_TRUE(s.purchase.has_value());
    EXPECT_TRUE(s.purchase->success);
    EXPECT_EQ(s.purchase->paid_price, want.price_low);
    EXPECT_TRUE(admissible(s).empty());
    EXPECT_FALSE(step(s, "click[back to search]").accepted);
}

TEST(ShopStep, MissingOptionFails) {
    const auto cat = catalog_for(1);
    const Product& want = *satisfying_products(*cat).front();
    State s = open_detail(initial_state(cat), want);
    s = must_step(s, "click[buy now]");
    ASSERT_TRUE(s.purchase.has_value());
    EXPECT_FALSE(s.purchase->success);
}

TEST(ShopStep, NextOnLastPageRejected) {
    State s = must_step(initial_state(catalog_for(2)), "search[shirt]");
    for (int i = 1; i < 5; ++i) s = must_step(s, "click[next >]");
    EXPECT_EQ(s.page.page_index, 5);
    EXPECT_FALSE(step(s, "click[next >]").accepted);
    EXPECT_FALSE(step(must_step(initial_state(catalog_for(2)), "search[shirt]"), "click[< prev]").accepted);
}

TEST(ShopStep, UnknownTargetsRejected) {
    const State start = initial_state(catalog_for(3));
    EXPECT_FALSE(step(start, "click[buy now]").accepted);
    EXPECT_FALSE(step(start, "search[]").accepted);
    EXPECT_FALSE(step(start, "buy everything").accepted);
    const State results = must_step(start, "search[jacket]");
    EXPECT_FALSE(step(results, "click[bx12345678]").accepted);
    EXPECT_FALSE(step(results, "search[jacket]").accepted);
}

TEST(ShopStep, CaseInsensitiveActions) {
    const State start = initial_state(catalog_for(3));
    const State a = must_step(start, "search[Jacket]");
    const State b = must_step(start, "  SEARCH[jacket] ");
    EXPECT_EQ(render(a), render(b));
}

TEST(ShopPages, BackThenResearchReproducesPage) {
    const auto cat = catalog_for(7);
    const State r1 = must_step(initial_state(cat), "search[cotton shorts]");
    const State detail = must_step(r1, "click[" + lower(r1.page.visible_asins[3]) + "]");
    const State back = must_step(detail, "click[back to search]");
    EXPECT_EQ(back.page.kind, PageKind::search);
    const State r2 = must_step(back, "search[cotton shorts]");
    EXPECT_EQ(render(r1), render(r2));
}

TEST(ShopPages, PurchaseIndependentOfPath) {
    const auto cat = catalog_for(8);
    const Product& want = *satisfying_products(*cat).front();
    State direct = open_detail(initial_state(cat), want);
    // Detour: a different search, a detail page, back, then the same product.
    State detour = must_step(initial_state(cat), "search[pants]");
    detour = must_step(detour, "click[" + lower(detour.page.visible_asins[0]) + "]");
    detour = must_step(detour, "click[back to search]");
    detour = open_detail(detour, want);
    for (auto* s : {&direct, &detour}) {
        for (const auto& [name, value] : cat->goal.required_options) {
            *s = must_step(*s, "click[" + value + "]");
        }
        *s = must_step(*s, "click[buy now]");
    }
    EXPECT_EQ(direct.purchase->success, detour.purchase->success);
    EXPECT_EQ(direct.purchase->asin, detour.purchase->asin);
    EXPECT_EQ(direct.purchase->options, detour.purchase->options);
}

TEST(ShopRender, ResultsLayout) {
    const auto cat = catalog_for(10);
    const State s = must_step(initial_state(cat), "search[shirt]");
    const std::string text = render(s);
    const std::string head = "'Back to Search' [SEP] 'Page 1 (Total results: 50)' [SEP] 'Next >' [SEP] '";
    EXPECT_EQ(text.substr(0, head.size()), head);
    const Product& first = *cat->find(s.page.visible_asins[0]);
    EXPECT_NE(text.find("'" + first.asin + "' [SEP] '" + first.title + "' [SEP] '" +
                        format_price(first.price_low, first.price_high) + "'"),
              std::string::npos);
    const auto a = admissible(s);
    EXPECT_EQ(a[0], "click[back to search]");
    EXPECT_EQ(a[1], "click[next >]");
    EXPECT_EQ(a[2], "click[" + lower(first.asin) + "]");
}

TEST(ShopRender, DetailLayout) {
    const auto cat = catalog_for(10);
    const Product& p = cat->products[0];
    const State s = open_detail(initial_state(cat), p);
    const std::string text = render(s);
    const std::string head = "'Back to Search' [SEP] '< Prev' [SEP] ";
    EXPECT_EQ(text.substr(0, head.size()), head);
    const std::string tail = "'" + p.title + "' [SEP] 'Price: " + format_price(p.price_low, p.price_high) +
                             "' [SEP] 'Rating: N.A.' [SEP] 'Description' [SEP] 'Features' [SEP] 'Reviews' "
                             "[SEP] 'Buy Now'";
    ASSERT_GE(text.size(), tail.size());
    EXPECT_EQ(text.substr(text.size() - tail.size()), tail);
    EXPECT_EQ(admissible(s).back(), "click[buy now]");
}

TEST(ShopRender, PriceFormat) {
    EXPECT_EQ(format_price(3.78, 11.38), "$3.78 to $11.38");
    EXPECT_EQ(format_price(5.0, 5.0), "$5.00");
}

TEST(ShopRender, SearchPageOffersTemplate) {
    const State s = initial_state(catalog_for(1));
    EXPECT_EQ(admissible(s), std::vector<std::string>{std::string(kSearchTemplate)});
}

TEST(ShopGreedy, AlwaysBuysSuccessfully) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        State s = initial_state(catalog_for(seed));
        int steps = 0;
        while (!s.purchase && steps < 15) {
            const auto a = greedy_action(s);
            ASSERT_TRUE(a.has_value());
            s = must_step(s, *a);
            ++steps;
        }
        ASSERT_TRUE(s.purchase.has_value()) << "seed " << seed;
        EXPECT_TRUE(s.purchase->success);
    }
}
