#pragma once

// Pattern-rule engine that turns a question/answer pair into an entailment
// and a contradiction.
//
// Rules are written in a plain-text table, one record per line, fields
// separated by a standalone "|":
//
//   id | question pattern | gates | positive template | negative template | kind
//
// Pattern tokens:  literal, alternation "photo|image|picture", "{_}" (any one
// token), "{X}" (one or more tokens, greedy), "{X:1}" (exactly one token).
// Gates:           "-" or a comma list of name:CAPTURE with name in
//                  adj, color, nonpronoun.
// Template tokens: literals and capture references "{X}", "{X:bare}"
//                  (leading determiner removed), "{X:indef}" (bare phrase with
//                  "a"/"an" when singular), "{X:be}" ("is"/"are" by number).
// Kinds:           polar (needs a yes/no answer), color (binds {C} to the
//                  colour words of the answer), copy (binds {A} to the answer).
//
// Records sharing an id are alternative patterns of one rule. Questions are
// matched with trailing punctuation removed; the first matching record wins.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scorekeeping/lexicon.hpp"
#include "scorekeeping/model.hpp"

namespace scorekeeping {

enum class AnswerPolarity { Positive, Negative, Abstain };

/// Classifies an answer by its first non-punctuation token.
AnswerPolarity answer_polarity(std::span<const std::string> answer, const Lexicons& lex = Lexicons::defaults());

enum class AnswerCondition { RequiresPolarity, ColorExtract, PredicateCopy };

struct PatternToken {
  enum class Kind { Literal, Wildcard, Capture };
  Kind kind = Kind::Literal;
  std::vector<std::string> alternatives;  // Literal
  std::string name;                       // Capture
  bool single = false;                    // Capture: exactly one token
};

struct TemplateToken {
  enum class Modifier { None, Bare, Indef, Be };
  bool is_ref = false;
  std::string text;  // literal text or capture name
  Modifier modifier = Modifier::None;
};

struct Gate {
  enum class Kind { Adjective, Color, NonPronoun };
  Kind kind = Kind::Adjective;
  std::string capture;
};

struct Rule {
  std::string rule_id;
  std::vector<PatternToken> question_pattern;
  std::vector<Gate> gates;
  std::vector<TemplateToken> positive_template;
  std::vector<TemplateToken> negative_template;
  AnswerCondition answer_condition = AnswerCondition::RequiresPolarity;
  std::size_t source_line = 0;
};

struct Capture {
  std::string name;
  Tokens tokens;
};

struct RuleMatch {
  std::vector<Capture> captures;
  AnswerPolarity polarity = AnswerPolarity::Abstain;

  const Capture* find(std::string_view name) const;
};

/// Parses a rule table. Throws DslError with line/column on malformed input.
std::vector<Rule> parse_rules(std::string_view text);
std::vector<Rule> load_rules(const std::string& path);

/// The bundled rule set reproducing the reference fixtures.
std::string_view canonical_rules_text() noexcept;
const std::vector<Rule>& canonical_rules();

std::optional<RuleMatch> match_rule(const Rule& rule, std::span<const std::string> question,
                                    std::span<const std::string> answer, const Lexicons& lex = Lexicons::defaults());

/// First rule (in declaration order) matching the pair, with its match.
struct FirstMatch {
  const Rule* rule = nullptr;
  RuleMatch match;
};
std::optional<FirstMatch> match_first(std::span<const Rule> rules, std::span<const std::string> question,
                                      std::span<const std::string> answer, const Lexicons& lex = Lexicons::defaults());

/// Expands one template against the bound captures. Throws TemplateError when
/// a referenced capture is unbound.
Tokens expand_template(std::span<const TemplateToken> tmpl, const RuleMatch& match,
                       const Lexicons& lex = Lexicons::defaults());

struct PropositionPair {
  Proposition entailment;
  Proposition contradiction;
};

/// Fills both templates. The template agreeing with the answer becomes the
/// entailment (true to A); for non-polar kinds the positive template is the
/// entailment. Ids and pair ids are left for the caller to assign.
PropositionPair instantiate(const Rule& rule, const RuleMatch& match, std::int64_t dialogue_id, int source_turn,
                            const Lexicons& lex = Lexicons::defaults());

}  // namespace scorekeeping
