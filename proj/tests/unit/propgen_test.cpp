#include <algorithm>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "../support/golden.hpp"
#include "../support/oracles.hpp"
#include "scorekeeping/corpus_io.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/propgen.hpp"
#include "scorekeeping/tokenize.hpp"

namespace sk = scorekeeping;

namespace {

std::string fixture(const std::string& name) { return std::string(SK_FIXTURE_DIR) + "/" + name; }

sk::GenerationResult generate_plain(const std::vector<sk::Dialogue>& dialogues, const sk::WordSet* blocklist = nullptr) {
  sk::GenerationInputs in;
  in.dialogues = dialogues;
  in.rules = sk::canonical_rules();
  in.blocklist = blocklist;
  return sk::generate(in);
}

sk::Dialogue simple_dialogue(std::int64_t id) {
  sk::Dialogue d;
  d.id = id;
  d.caption = sk::tokenize("a dog on a green couch.");
  const char* qa[][2] = {{"is the dog big?", "yes"}, {"any people?", "no."}, {"is it sunny?", "yes"}};
  for (int t = 1; t <= 10; ++t) {
    const auto& p = qa[(t - 1) % 3];
    d.turns.push_back({t, sk::tokenize(p[0]), sk::tokenize(p[1])});
  }
  return d;
}

}  // namespace

TEST(GoldenListing, ListingReproducedExactly) {
  const auto dialogues = sk::load_dialogues(fixture("golden_dialogues.json"));
  ASSERT_EQ(dialogues.size(), 4u);
  const auto result = generate_plain(dialogues);
  const auto render = sktest::render_golden(dialogues, result.ordered);
  for (const auto& kept : sktest::golden_kept_captions()) EXPECT_TRUE(render.caption_entailments.contains(kept)) << kept;
  EXPECT_EQ(render.listing, sktest::read_text(fixture("golden_listing.txt")));
}

TEST(GoldenListing, IdsArePositionalAndPairsShareIds) {
  const auto dialogues = sk::load_dialogues(fixture("golden_dialogues.json"));
  const auto result = generate_plain(dialogues);
  ASSERT_FALSE(result.ordered.empty());
  for (std::size_t i = 0; i < result.ordered.size(); ++i) EXPECT_EQ(result.ordered[i].id, static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i + 1 < result.ordered.size(); i += 2) {
    EXPECT_EQ(result.ordered[i].pair_id, result.ordered[i + 1].pair_id);
    EXPECT_EQ(result.ordered[i].truth, sk::Truth::TrueToA);
    EXPECT_EQ(result.ordered[i + 1].truth, sk::Truth::FalseToA);
  }
  EXPECT_EQ(result.log.props_out, result.ordered.size());
}

TEST(Generate, EmptyCorpus) {
  const auto result = generate_plain({});
  EXPECT_TRUE(result.ordered.empty());
  EXPECT_EQ(result.log.dialogues_in, 0u);
  EXPECT_EQ(result.log.props_out, 0u);
}

TEST(Generate, BlocklistDropsWholeDialogues) {
  const std::vector<sk::Dialogue> dialogues{simple_dialogue(1), simple_dialogue(2)};
  auto modified = dialogues;
  modified[1].turns[4].answer = sk::tokenize("a forbidden word");
  const sk::WordSet blocklist{"forbidden"};
  const auto result = generate_plain(modified, &blocklist);
  EXPECT_EQ(result.log.dialogues_blocked, 1u);
  EXPECT_EQ(result.props.count(2), 0u);
  EXPECT_EQ(result.props.count(1), 1u);
  const sk::WordSet empty;
  EXPECT_TRUE(sk::filter_dialogue(modified[1], empty));
}

TEST(Generate, FilterPropRejectsLongAndPronounSurfaces) {
  sk::Proposition p;
  p.surface = sk::tokenize("it is sunny.");
  EXPECT_TRUE(sk::filter_prop(p));
  p.surface = sk::tokenize("he is tall.");
  EXPECT_FALSE(sk::filter_prop(p));
  p.surface = sk::Tokens(sk::kMaxPropositionTokens, "dog");
  EXPECT_TRUE(sk::filter_prop(p));
  p.surface.push_back("dog");
  EXPECT_FALSE(sk::filter_prop(p));
}

TEST(Captions, LexiconChunker) {
  const auto chunks = sk::caption_chunks(sk::tokenize("a black cat laying in the sun on a green bench."), nullptr);
  ASSERT_FALSE(chunks.empty());
  EXPECT_EQ(sk::join_tokens(chunks.front()), "a black cat");
}

TEST(Captions, PosTagsDriveChunking) {
  const auto caption = sk::tokenize("a shiny gizmo near the wall");
  using T = sk::PosTag;
  const std::vector<T> tags{T::Other, T::Adj, T::Noun, T::Other, T::Other, T::Noun};
  const auto chunks = sk::caption_chunks(caption, &tags);
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(sk::join_tokens(chunks[0]), "a shiny gizmo");
  EXPECT_EQ(sk::join_tokens(chunks[1]), "the wall");
  const auto pairs = sk::caption_props(caption, nullptr, 5);
  for (const auto& pair : pairs) {
    EXPECT_EQ(pair.entailment.source_turn, 0);
    EXPECT_EQ(pair.entailment.rule_id, "caption");
  }
}

TEST(Pronouns, NoSidecarLeavesDialogueUnchanged) {
  const auto d = simple_dialogue(1);
  const auto out = sk::replace_pronouns(d, nullptr);
  EXPECT_EQ(out.turns[2].question, d.turns[2].question);
}

TEST(Pronouns, SidecarErrors) {
  const auto d = simple_dialogue(1);
  sk::CorefSidecar wrong{2, {}};
  EXPECT_THROW(sk::replace_pronouns(d, &wrong), sk::SidecarError);
  sk::CorefSidecar oob{1, {{{0, 0, 2}, {3, 0, 40}}}};
  EXPECT_THROW(sk::replace_pronouns(d, &oob), sk::SidecarError);
}

TEST(Pronouns, LongEntitiesAreNotSubstituted) {
  auto d = simple_dialogue(1);
  d.caption = sk::tokenize("the very old big brown dog");
  sk::CorefSidecar c{1, {{{0, 0, 6}, {3, 1, 2}}}};  // "it" in "is it sunny ?"
  std::size_t n = 0;
  const auto out = sk::replace_pronouns(d, &c, sk::Lexicons::defaults(), &n);
  EXPECT_EQ(n, 0u);
  EXPECT_EQ(out.turns[2].question, d.turns[2].question);
}

// Property: token-level replacement agrees with rebuilding the question text
// by plain string substitution of the pronoun words.
TEST(PronounsProperty, MatchesStringSubstitution) {
  sktest::Gen gen(99);
  const std::vector<std::string> entities{"the dog", "a red car", "the lady", "two men"};
  const std::vector<std::string> pronouns{"it", "its", "they", "their", "her", "him", "this", "those"};
  const sk::WordSet possessive{"his", "her", "its", "their", "hers", "theirs"};
  for (int trial = 0; trial < 400; ++trial) {
    const std::string entity = entities[static_cast<std::size_t>(gen.between(0, 3))];
    sk::Dialogue d;
    d.id = trial;
    d.caption = sk::tokenize(entity + " near a wall");
    sk::CorefSidecar coref{trial, {{}}};
    auto& cluster = coref.clusters[0];
    cluster.push_back({0, 0, sk::tokenize(entity).size()});
    std::vector<std::string> expected;
    for (int t = 1; t <= 10; ++t) {
      std::vector<std::string> words;
      std::vector<std::string> want;
      const int len = gen.between(2, 6);
      for (int i = 0; i < len; ++i) {
        if (gen.coin(0.3)) {
          const auto& pr = pronouns[static_cast<std::size_t>(gen.between(0, int(pronouns.size()) - 1))];
          cluster.push_back({t, words.size(), words.size() + 1});
          words.push_back(pr);
          want.push_back(possessive.contains(pr) ? entity + "'s" : entity);
        } else {
          words.push_back(gen.word());
          want.push_back(words.back());
        }
      }
      std::string q;
      for (const auto& w : words) q += w + " ";
      d.turns.push_back({t, sk::tokenize(q + "?"), sk::tokenize("yes")});
      std::string e;
      for (const auto& w : want) e += w + " ";
      expected.push_back(e + "?");
    }
    const auto out = sk::replace_pronouns(d, &coref);
    for (int t = 0; t < 10; ++t) {
      ASSERT_EQ(sk::join_tokens(out.turns[static_cast<std::size_t>(t)].question),
                sk::join_tokens(sk::tokenize(expected[static_cast<std::size_t>(t)])))
          << "trial " << trial << " turn " << t + 1;
    }
  }
}

TEST(Sidecars, LoadAndReject) {
  const auto dir = std::filesystem::temp_directory_path() / "sk_sidecar_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "coref.jsonl") << R"({"dialogue_id":3,"clusters":[[[0,0,2],[2,1,2]]]})" << "\n";
    std::ofstream(dir / "pos.jsonl") << R"({"dialogue_id":3,"tags":[["OTHER","NOUN"],["ADJ"]]})" << "\n";
    std::ofstream(dir / "bad.jsonl") << R"({"dialogue_id":3,"clusters":[[[0,0]]]})" << "\n";
  }
  const auto coref = sk::load_coref(dir / "coref.jsonl");
  ASSERT_EQ(coref.count(3), 1u);
  EXPECT_EQ(coref.at(3).clusters[0][1].turn, 2);
  const auto pos = sk::load_pos(dir / "pos.jsonl");
  EXPECT_EQ(pos.at(3).tags[0][1], sk::PosTag::Noun);
  EXPECT_THROW(sk::load_coref(dir / "bad.jsonl"), sk::Error);
  std::filesystem::remove_all(dir);
}
