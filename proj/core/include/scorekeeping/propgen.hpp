#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scorekeeping/lexicon.hpp"
#include "scorekeeping/model.hpp"
#include "scorekeeping/rules.hpp"

namespace scorekeeping {

/// Token span inside one turn. Turn 0 is the caption; turn i >= 1 is the
/// question tokens followed by the answer tokens. `end` is exclusive.
struct Mention {
  int turn = 0;
  std::size_t start = 0;
  std::size_t end = 0;
};

struct CorefSidecar {
  std::int64_t dialogue_id = 0;
  std::vector<std::vector<Mention>> clusters;  // first mention first
};

enum class PosTag : std::uint8_t { Noun, Adj, Other };

struct PosSidecar {
  std::int64_t dialogue_id = 0;
  std::vector<std::vector<PosTag>> tags;  // per turn, token-aligned
};

/// Longest entity (in tokens) that may replace a pronoun.
inline constexpr std::size_t kMaxEntityTokens = 5;
/// Longest proposition (in tokens) kept by filter_prop.
inline constexpr std::size_t kMaxPropositionTokens = 15;

/// Tokens of turn i as addressed by sidecars.
Tokens turn_tokens(const Dialogue& dialogue, int turn);

/// Replaces pronouns in questions and answers by the first mention of their
/// coreference cluster. Possessive pronouns (and "her", always) become the
/// entity with "'s" attached to its last token. Clusters whose entity is
/// longer than kMaxEntityTokens are skipped. Throws SidecarError on a
/// dialogue id mismatch or out-of-bounds span.
/// `replaced_count`, when given, is incremented by the number of replacements.
Dialogue replace_pronouns(const Dialogue& dialogue, const CorefSidecar* coref,
                          const Lexicons& lex = Lexicons::defaults(), std::size_t* replaced_count = nullptr);

/// Noun-phrase chunks of the caption: determiner + adjectives + noun(s).
/// POS-driven when tags are given, lexicon-driven otherwise.
std::vector<Tokens> caption_chunks(std::span<const std::string> caption, const std::vector<PosTag>* tags,
                                   const Lexicons& lex = Lexicons::defaults());

/// ("one can see NP.", "one cannot see NP.") per chunk, source turn 0.
std::vector<PropositionPair> caption_props(std::span<const std::string> caption, const PosSidecar* pos,
                                           std::int64_t dialogue_id, const Lexicons& lex = Lexicons::defaults());

/// False when the surface is too long or holds a listed pronoun other than "it".
bool filter_prop(const Proposition& prop, const Lexicons& lex = Lexicons::defaults());

/// False when any caption/question/answer token is in the blocklist.
bool filter_dialogue(const Dialogue& dialogue, const WordSet& blocklist);

struct GenerationLog {
  std::size_t dialogues_in = 0;
  std::size_t dialogues_blocked = 0;
  std::size_t dialogues_without_props = 0;
  std::size_t dialogues_out = 0;
  std::size_t caption_pairs = 0;
  std::size_t turn_pairs = 0;
  std::size_t props_filtered = 0;
  std::size_t props_out = 0;
  std::size_t pronouns_replaced = 0;
  std::size_t captions_without_chunks = 0;
  std::map<std::string, std::size_t> rule_hits;
};

struct GenerationInputs {
  std::span<const Dialogue> dialogues;
  std::span<const Rule> rules;
  const std::map<std::int64_t, CorefSidecar>* coref = nullptr;
  const std::map<std::int64_t, PosSidecar>* pos = nullptr;
  const WordSet* blocklist = nullptr;
  const Lexicons* lexicons = nullptr;
};

struct GenerationResult {
  /// Dialogue id -> propositions, only for dialogues with at least one.
  std::map<std::int64_t, std::vector<Proposition>> props;
  /// Same propositions in emission order; ids are 0..n-1 in this order.
  std::vector<Proposition> ordered;
  GenerationLog log;
};

/// filter_dialogue -> replace_pronouns -> caption_props -> per-turn rule
/// match/instantiate -> filter_prop. Dialogues are processed in input order,
/// entailment before contradiction.
GenerationResult generate(const GenerationInputs& in);

}  // namespace scorekeeping
