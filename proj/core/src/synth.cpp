#include <array>
#include <set>
#include <string>
#include <utility>

#include "scorekeeping/embed.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/rng.hpp"
#include "scorekeeping/tokenize.hpp"

namespace scorekeeping {

namespace {

struct Noun {
  const char* singular;
  const char* plural;
};

// Turn t draws its noun from the kPoolSize entries starting at (t - 1) * kPoolSize,
// so a proposition's nouns identify the turn it came from.
constexpr std::size_t kPoolSize = 4;
constexpr std::array<Noun, kPoolSize * kMaxTurns> kNouns = {{
    {"dog", "dogs"},       {"cat", "cats"},           {"horse", "horses"},       {"cow", "cows"},
    {"bird", "birds"},     {"elephant", "elephants"}, {"giraffe", "giraffes"},   {"zebra", "zebras"},
    {"bear", "bears"},     {"duck", "ducks"},         {"car", "cars"},           {"truck", "trucks"},
    {"bus", "buses"},      {"train", "trains"},       {"plane", "planes"},       {"boat", "boats"},
    {"table", "tables"},   {"chair", "chairs"},       {"bench", "benches"},      {"bed", "beds"},
    {"window", "windows"}, {"door", "doors"},         {"cabinet", "cabinets"},   {"book", "books"},
    {"plant", "plants"},   {"flower", "flowers"},     {"tree", "trees"},         {"building", "buildings"},
    {"sign", "signs"},     {"plate", "plates"},       {"bowl", "bowls"},         {"cup", "cups"},
    {"bottle", "bottles"}, {"apple", "apples"},       {"banana", "bananas"},     {"carrot", "carrots"},
    {"donut", "donuts"},   {"umbrella", "umbrellas"}, {"kite", "kites"},         {"toy", "toys"},
}};

constexpr std::array<const char*, 6> kSubjects = {"man", "woman", "boy", "girl", "child", "lady"};
constexpr std::array<const char*, 4> kSubjectAdjectives = {"young", "happy", "little", "cute"};
constexpr std::array<const char*, 6> kPlaces = {"fence", "wall", "hill", "pole", "lake", "river"};
constexpr std::array<const char*, 6> kVerbs = {"sitting near", "standing by", "resting beside",
                                               "next to",      "behind",      "in front of"};
constexpr std::array<const char*, 12> kAdjectives = {"big",  "small", "old",  "new",   "wet",   "dry",
                                                     "clean", "dirty", "open", "shiny", "round", "wooden"};
constexpr std::array<const char*, 12> kColors = {"black", "white", "red",   "green", "yellow", "blue",
                                                 "brown", "orange", "pink", "purple", "gray",  "silver"};
constexpr std::array<const char*, 3> kYes = {"yes", "yeah", "yep"};
constexpr std::array<const char*, 3> kNo = {"no", "nope", "not really"};
constexpr std::array<const char*, 5> kCounts = {"two", "three", "just one", "a few", "many"};

template <typename T, std::size_t N>
const T& pick(const std::array<T, N>& arr, Rng& rng) {
  return arr[static_cast<std::size_t>(uniform_below(rng, N))];
}

// Draws an entry not yet used in this dialogue; pools outnumber the draws.
template <typename T, std::size_t N>
const T& pick_unused(const std::array<T, N>& arr, std::set<std::size_t>& used, Rng& rng) {
  for (;;) {
    const auto i = static_cast<std::size_t>(uniform_below(rng, N));
    if (used.insert(i).second) return arr[i];
  }
}

std::string cat(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

std::vector<Dialogue> synth_corpus(std::size_t count, std::uint64_t seed, Split split, std::int64_t first_id) {
  Rng rng(seed);
  std::vector<Dialogue> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Dialogue d;
    d.id = first_id + static_cast<std::int64_t>(k);
    d.image_id = 100000 + d.id;
    d.split = split;
    d.caption = tokenize(cat({"a", pick(kSubjectAdjectives, rng), pick(kSubjects, rng), pick(kVerbs, rng), "a",
                              pick(kPlaces, rng)}));

    std::set<std::size_t> adjectives;
    std::set<std::size_t> colors;
    for (int t = 1; t <= kMaxTurns; ++t) {
      const auto& n = kNouns[static_cast<std::size_t>(t - 1) * kPoolSize + uniform_below(rng, kPoolSize)];
      std::string q;
      std::string a = uniform_below(rng, 2) == 0 ? pick(kYes, rng) : pick(kNo, rng);
      switch (uniform_below(rng, 11)) {
        case 0: q = cat({"is there a", n.singular}); break;
        case 1: q = cat({"are there any", n.plural}); break;
        case 2: q = cat({"any", n.plural}); break;
        case 3: q = cat({"do you see a", n.singular}); break;
        case 4: q = cat({"can you see the", n.singular}); break;
        case 5:
          q = cat({"what color is the", n.singular});
          a = cat({"it is", pick_unused(kColors, colors, rng)});
          break;
        case 6: q = cat({"is the", n.singular, pick_unused(kAdjectives, adjectives, rng)}); break;
        case 7: q = cat({"are the", n.plural, pick_unused(kAdjectives, adjectives, rng)}); break;
        case 8:
          q = cat({"how many", n.plural, "are there"});
          a = pick(kCounts, rng);
          break;
        case 9:
          q = cat({"where is the", n.singular});
          a = "somewhere in the back";
          break;
        default:
          q = cat({"is there a", n.singular});
          a = "i can't tell";
          break;
      }
      d.turns.push_back({t, tokenize(q), tokenize(a)});
    }
    validate(d);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace scorekeeping
