#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "envforge/augment_spec.hpp"
#include "envforge/core.hpp"
#include "envforge/rng.hpp"
#include "envforge/shop.hpp"
#include "envforge/sokoban.hpp"

// Observation-only distractor injection. Every function here returns a new
// Observation whose injected_spans, once deleted, give back the input text
// byte for byte; environment state is never touched.
namespace envforge::augment {

namespace vocab {

inline constexpr std::array<std::string_view, 28> kAlfObjectTypes{
    "bowl",   "cup",    "pan",       "spoon",   "fork",     "knife",  "plate",
    "mug",    "bottle", "can",       "glass",   "basket",   "tray",   "vase",
    "jar",    "container", "jug",    "thermos", "pitcher",  "dish",   "tumbler",
    "sponge", "towel",  "napkin",    "rack",    "coaster",  "utensil", "lid",
};

inline constexpr std::array<std::string_view, 19> kAlfDescriptors{
    "cracked",          "dirty",              "slightly burnt",   "covered in dust",
    "wrapped in foil",  "sticky",             "still warm",       "rusty",
    "filled with water", "emits a faint smell", "has some liquid inside", "tipped over",
    "seems unused",     "greasy",             "wet on the surface", "has a faint label",
    "smudged",          "with faded color",   "shows fingerprints",
};

/// Sentence frames; {obj} is the "<type> <id>" name, {desc} the descriptor.
inline constexpr std::array<std::string_view, 2> kAlfTemplates{
    "You notice a {obj} that looks {desc}.",
    "Near the sink, there is a {obj} that is {desc}.",
};

inline constexpr std::array<std::string_view, 20> kWebCategories{
    "rompers",          "jumpsuits",        "blouses",        "cozy cardigans",
    "pajamas",          "loungewear sets",  "button-down tops", "long sleeve tees",
    "casual jackets",   "knitwear",         "soft sweaters",  "thermal layers",
    "fleece pullovers", "v-neck tunics",    "red outfits",    "plus-size picks",
    "cropped hoodies",  "layered looks",    "textured knits", "everyday basics",
};

inline constexpr std::array<std::string_view, 20> kWebPromos{
    "30% off",           "new arrivals",        "trending now",
    "selling fast",      "limited edition",     "back in stock",
    "editor's pick",     "members-only deal",   "must-have looks",
    "staff favorite",    "top-rated",           "recommended for daily wear",
    "cozy & cute",       "perfect for layering", "style spotlight",
    "hand-picked for you", "fan favorites",     "most loved by shoppers",
    "inspired by you",   "perfect for your capsule wardrobe",
};

inline constexpr std::array<std::string_view, 14> kWebTrivialFeatures{
    "fabric: machine wash cold",
    "shipping note: ships within 5-7 days",
    "sizing tip: runs half size large",
    "model info: model is 5'8'' wearing size medium",
    "brand description: known for cozy minimalism",
    "care label: made in Indonesia",
    "origin: eco-conscious packaging",
    "batch code: Spring 2024 release",
    "warehouse tag: popular for travel & errands",
    "return policy: soft fleece interior",
    "manufacturing month: delicate stitching on seams",
    "recommendation: designed for colder climates",
    "intended use: do not iron over print",
    "layering advice: packaged folded in bag",
};

inline constexpr std::array<std::string_view, 14> kWebTrivialProductTypes{
    "romper",  "jumpsuit", "blouse",   "tunic",  "pajama top",    "sweater",  "tank top",
    "hoodie",  "cardigan", "bodysuit", "thermal shirt", "dress", "coverall", "camisole",
};

inline constexpr std::array<std::string_view, 15> kWebNontargetFeatures{
    "sleeveless",       "misleadingly tagged", "overpriced",       "heavily discounted",
    "out of stock",     "not available in large size", "no reviews", "size runs small",
    "fabric mismatch",  "zipper broken",       "category mislabel", "style mismatch",
    "faded color",      "missing product images", "customer complaints",
};

/// "[AD] <descriptor> — shop <category> today!"
inline constexpr std::string_view kWebAdTemplate = "[AD] {promo} — shop {category} today!";

inline constexpr std::array<std::string_view, 2> kWebTrivialProductTemplates{
    "Women {desc} {obj} — likely unsuitable",
    "Warning: {desc} {obj} (cannot be selected)",
};

inline constexpr std::array<std::string_view, 7> kSokobanObjects{
    "Broken crate", "Sealed door", "Pile of rubble", "Faded sign",
    "Leaking pipe", "Loose tile",  "Stacked boxe",
};

inline constexpr std::array<std::string_view, 5> kSokobanLocations{
    "outside the room", "beyond the wall", "inaccessible", "behind a collapsed wall",
    "on a blocked corridor",
};

/// "(r, c) shows a <obj> (<desc>; unreachable)."
inline constexpr std::string_view kSokobanTemplate = "({row}, {col}) shows a {obj} ({desc}; unreachable).";

/// Fake result-page ASINs start with this prefix; catalog ASINs start with "B0".
inline constexpr std::string_view kFakeAsinPrefix = "BX";

}  // namespace vocab

// Volume formulas. Each estimated sentence/line is a fixed token cost.
int alf_sentence_count(double epsilon);                  // floor(eps / 12)
int web_result_count(double epsilon, double alpha);      // min(floor(eps/100 * alpha * 10), 10)
int web_feature_count(double epsilon);                   // max(1, floor(eps / 25))
int web_ad_count(double epsilon);                        // max(1, floor(eps / 30))
int sokoban_line_count(double epsilon);                  // max(1, floor(eps / 10))

/// Per-trajectory coin; true with probability spec.prob.
bool maybe_augment(const AugmentSpec& spec, Rng& rng);

/// Inserts distractor sentences at sentence boundaries of the scene
/// paragraph (the text between the first and the last blank line).
Observation augment_alfworld(std::string_view obs_text,
                             const std::vector<std::string>& scene_object_names,
                             const AugmentSpec& spec, Rng& rng);

/// Results pages get ad/trivial-product entries interleaved among the
/// organic items; detail pages get feature and ad sentences after the
/// description block. Search pages are returned unchanged.
Observation augment_webshop(const shop::Page& page, std::string_view rendering,
                            const AugmentSpec& spec, Rng& rng);

/// Appends out-of-grid "unreachable" lines after the rendering.
Observation augment_sokoban(const sokoban::State& state, std::string_view rendering,
                            const AugmentSpec& spec, Rng& rng);

/// Replaces "{key}" placeholders in a template.
std::string fill(std::string_view templ,
                 std::initializer_list<std::pair<std::string_view, std::string_view>> values);

}  // namespace envforge::augment
