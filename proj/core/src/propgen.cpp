#include "scorekeeping/propgen.hpp"

#include <algorithm>

#include "scorekeeping/errors.hpp"

namespace scorekeeping {

namespace {

const WordSet kPossessives = {"his", "her", "its", "their", "hers", "theirs"};
const WordSet kChunkDeterminers = {"a", "an", "the"};

bool is_modifier(const Lexicons& lex, const std::string& tok) {
  return lex.adjectives.contains(tok) || lex.colors.contains(tok) || lex.nouns.contains(tok);
}

std::optional<std::size_t> chunk_end_lexicon(std::span<const std::string> caption, std::size_t det,
                                             const Lexicons& lex) {
  constexpr std::size_t kMaxModifiers = 3;
  for (std::size_t k = kMaxModifiers + 1; k-- > 0;) {
    const std::size_t noun = det + 1 + k;
    if (noun >= caption.size()) continue;
    bool ok = lex.nouns.contains(caption[noun]);
    for (std::size_t j = det + 1; ok && j < noun; ++j) ok = is_modifier(lex, caption[j]);
    if (ok) return noun + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> chunk_end_tagged(std::span<const PosTag> tags, std::size_t det) {
  std::size_t j = det + 1;
  while (j < tags.size() && tags[j] == PosTag::Adj) ++j;
  const std::size_t first_noun = j;
  while (j < tags.size() && tags[j] == PosTag::Noun) ++j;
  if (j == first_noun) return std::nullopt;
  return j;
}

}  // namespace

Tokens turn_tokens(const Dialogue& dialogue, int turn) {
  if (turn < 0 || turn > dialogue.num_turns()) {
    throw SidecarError("turn " + std::to_string(turn) + " outside dialogue " + std::to_string(dialogue.id));
  }
  if (turn == 0) return dialogue.caption;
  const auto& t = dialogue.turns[static_cast<std::size_t>(turn - 1)];
  Tokens out = t.question;
  out.insert(out.end(), t.answer.begin(), t.answer.end());
  return out;
}

Dialogue replace_pronouns(const Dialogue& dialogue, const CorefSidecar* coref, const Lexicons& lex,
                          std::size_t* replaced_count) {
  if (coref == nullptr) return dialogue;
  if (coref->dialogue_id != dialogue.id) {
    throw SidecarError("coreference sidecar for dialogue " + std::to_string(coref->dialogue_id) +
                       " applied to dialogue " + std::to_string(dialogue.id));
  }
  std::vector<Tokens> turns;
  for (int i = 0; i <= dialogue.num_turns(); ++i) turns.push_back(turn_tokens(dialogue, i));
  for (const auto& cluster : coref->clusters) {
    for (const auto& m : cluster) {
      if (m.turn < 0 || m.turn > dialogue.num_turns() || m.start >= m.end ||
          m.end > turns[static_cast<std::size_t>(m.turn)].size()) {
        throw SidecarError("mention [" + std::to_string(m.turn) + "," + std::to_string(m.start) + "," +
                           std::to_string(m.end) + "] out of bounds in dialogue " + std::to_string(dialogue.id));
      }
    }
  }

  // (turn, token) -> replacement tokens; the first cluster claiming a token wins.
  std::map<std::pair<int, std::size_t>, Tokens> replacements;
  for (const auto& cluster : coref->clusters) {
    if (cluster.empty()) continue;
    const auto& head = cluster.front();
    const auto& src = turns[static_cast<std::size_t>(head.turn)];
    Tokens entity(src.begin() + static_cast<std::ptrdiff_t>(head.start),
                  src.begin() + static_cast<std::ptrdiff_t>(head.end));
    if (entity.size() > kMaxEntityTokens) continue;
    if (entity.size() == 1 && lex.pronouns.contains(entity.front())) continue;
    for (std::size_t k = 1; k < cluster.size(); ++k) {
      const auto& m = cluster[k];
      if (m.turn == 0 || m.end - m.start != 1) continue;
      const auto& tok = turns[static_cast<std::size_t>(m.turn)][m.start];
      if (!lex.pronouns.contains(tok)) continue;
      Tokens rep = entity;
      if (kPossessives.contains(tok)) rep.back() += "'s";
      replacements.try_emplace({m.turn, m.start}, std::move(rep));
    }
  }
  if (replaced_count != nullptr) *replaced_count += replacements.size();
  if (replacements.empty()) return dialogue;

  Dialogue out = dialogue;
  for (int i = 1; i <= dialogue.num_turns(); ++i) {
    auto& qa = out.turns[static_cast<std::size_t>(i - 1)];
    const std::size_t q_len = qa.question.size();
    // Descending positions keep earlier offsets valid.
    for (auto it = replacements.rbegin(); it != replacements.rend(); ++it) {
      if (it->first.first != i) continue;
      const std::size_t pos = it->first.second;
      auto& target = pos < q_len ? qa.question : qa.answer;
      const std::size_t local = pos < q_len ? pos : pos - q_len;
      target.erase(target.begin() + static_cast<std::ptrdiff_t>(local));
      target.insert(target.begin() + static_cast<std::ptrdiff_t>(local), it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::vector<Tokens> caption_chunks(std::span<const std::string> caption, const std::vector<PosTag>* tags,
                                   const Lexicons& lex) {
  if (tags != nullptr && tags->size() != caption.size()) {
    throw SidecarError("caption has " + std::to_string(caption.size()) + " tokens but " +
                       std::to_string(tags->size()) + " POS tags");
  }
  std::vector<Tokens> chunks;
  std::size_t i = 0;
  while (i < caption.size()) {
    if (!kChunkDeterminers.contains(caption[i])) {
      ++i;
      continue;
    }
    const auto end = tags != nullptr ? chunk_end_tagged(*tags, i) : chunk_end_lexicon(caption, i, lex);
    if (!end) {
      ++i;
      continue;
    }
    chunks.emplace_back(caption.begin() + static_cast<std::ptrdiff_t>(i),
                        caption.begin() + static_cast<std::ptrdiff_t>(*end));
    i = *end;
  }
  return chunks;
}

std::vector<PropositionPair> caption_props(std::span<const std::string> caption, const PosSidecar* pos,
                                           std::int64_t dialogue_id, const Lexicons& lex) {
  const std::vector<PosTag>* tags = nullptr;
  if (pos != nullptr) {
    if (pos->dialogue_id != dialogue_id) {
      throw SidecarError("POS sidecar for dialogue " + std::to_string(pos->dialogue_id) + " applied to dialogue " +
                         std::to_string(dialogue_id));
    }
    if (pos->tags.empty()) throw SidecarError("POS sidecar has no caption tags");
    tags = &pos->tags.front();
  }
  std::vector<PropositionPair> out;
  for (auto& np : caption_chunks(caption, tags, lex)) {
    auto make = [&](std::initializer_list<const char*> prefix, Truth truth, PolarityKind pk) {
      Proposition p;
      for (const char* w : prefix) p.surface.emplace_back(w);
      p.surface.insert(p.surface.end(), np.begin(), np.end());
      p.surface.emplace_back(".");
      p.dialogue_id = dialogue_id;
      p.source_turn = 0;
      p.truth = truth;
      p.polarity_kind = pk;
      p.rule_id = "caption";
      p.question_kind = QuestionKind::Other;
      return p;
    };
    out.push_back({make({"one", "can", "see"}, Truth::TrueToA, PolarityKind::Entailment),
                   make({"one", "cannot", "see"}, Truth::FalseToA, PolarityKind::Contradiction)});
  }
  return out;
}

bool filter_prop(const Proposition& prop, const Lexicons& lex) {
  if (prop.surface.size() > kMaxPropositionTokens) return false;
  return std::none_of(prop.surface.begin(), prop.surface.end(),
                      [&](const std::string& t) { return t != "it" && lex.pronouns.contains(t); });
}

bool filter_dialogue(const Dialogue& dialogue, const WordSet& blocklist) {
  if (blocklist.empty()) return true;
  auto blocked = [&](const Tokens& toks) {
    return std::any_of(toks.begin(), toks.end(), [&](const std::string& t) { return blocklist.contains(t); });
  };
  if (blocked(dialogue.caption)) return false;
  return std::none_of(dialogue.turns.begin(), dialogue.turns.end(),
                      [&](const QaTurn& t) { return blocked(t.question) || blocked(t.answer); });
}

GenerationResult generate(const GenerationInputs& in) {
  const Lexicons& lex = in.lexicons != nullptr ? *in.lexicons : Lexicons::defaults();
  GenerationResult result;
  auto& log = result.log;
  std::int64_t next_id = 0;
  std::int64_t next_pair = 0;

  for (const auto& original : in.dialogues) {
    ++log.dialogues_in;
    if (in.blocklist != nullptr && !filter_dialogue(original, *in.blocklist)) {
      ++log.dialogues_blocked;
      continue;
    }
    const CorefSidecar* coref = nullptr;
    if (in.coref != nullptr) {
      if (auto it = in.coref->find(original.id); it != in.coref->end()) coref = &it->second;
    }
    const PosSidecar* pos = nullptr;
    if (in.pos != nullptr) {
      if (auto it = in.pos->find(original.id); it != in.pos->end()) pos = &it->second;
    }
    const Dialogue dialogue = replace_pronouns(original, coref, lex, &log.pronouns_replaced);
    std::vector<PropositionPair> pairs = caption_props(dialogue.caption, pos, dialogue.id, lex);
    log.caption_pairs += pairs.size();
    if (pairs.empty()) ++log.captions_without_chunks;
    for (const auto& turn : dialogue.turns) {
      auto hit = match_first(in.rules, turn.question, turn.answer, lex);
      if (!hit) continue;
      ++log.rule_hits[hit->rule->rule_id];
      ++log.turn_pairs;
      pairs.push_back(instantiate(*hit->rule, hit->match, dialogue.id, turn.index, lex));
    }

    std::vector<Proposition> kept;
    for (auto& pair : pairs) {
      if (!filter_prop(pair.entailment, lex) || !filter_prop(pair.contradiction, lex)) {
        log.props_filtered += 2;
        continue;
      }
      pair.entailment.pair_id = pair.contradiction.pair_id = next_pair++;
      pair.entailment.id = next_id++;
      pair.contradiction.id = next_id++;
      kept.push_back(std::move(pair.entailment));
      kept.push_back(std::move(pair.contradiction));
    }
    if (kept.empty()) {
      ++log.dialogues_without_props;
      continue;
    }
    ++log.dialogues_out;
    log.props_out += kept.size();
    result.ordered.insert(result.ordered.end(), kept.begin(), kept.end());
    result.props.emplace(dialogue.id, std::move(kept));
  }
  return result;
}

}  // namespace scorekeeping
