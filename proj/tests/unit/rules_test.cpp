#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "scorekeeping/errors.hpp"
#include "scorekeeping/rules.hpp"
#include "scorekeeping/tokenize.hpp"

namespace sk = scorekeeping;

namespace {

const sk::Rule& rule_named(const std::vector<sk::Rule>& rules, const std::string& id) {
  for (const auto& r : rules) {
    if (r.rule_id == id) return r;
  }
  throw std::runtime_error("no rule " + id);
}

std::string surface(const sk::Proposition& p) { return sk::detokenize(p.surface); }

}  // namespace

TEST(Rules, InstalledTableMatchesBundledText) {
  std::ifstream in(SK_RULES_FILE, std::ios::binary);
  ASSERT_TRUE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), std::string(sk::canonical_rules_text()));
}

TEST(Rules, CanonicalTableParses) {
  const auto& rules = sk::canonical_rules();
  EXPECT_EQ(rules.size(), 12u);
  EXPECT_EQ(rules.front().rule_id, "R1");
  EXPECT_EQ(rule_named(rules, "R6").answer_condition, sk::AnswerCondition::ColorExtract);
  int r7 = 0;
  for (const auto& r : rules) r7 += r.rule_id == "R7";
  EXPECT_EQ(r7, 2);
}

TEST(Rules, DslErrorsCarryLineAndColumn) {
  const std::string good = "R1 | are there {X} | - | there are {X} . | there are no {X} . | polar\n";
  const std::string bad = "R2 | is there {X} | - | there is {X} . | there is no {Y} . | polar\n";
  try {
    sk::parse_rules("# header\n" + good + bad);
    FAIL() << "expected DslError";
  } catch (const sk::DslError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), bad.find("{Y}") + 1);
  }
}

TEST(Rules, DslRejectsMalformedRecords) {
  EXPECT_THROW(sk::parse_rules("R1 | are there {X} | - | there are {X} . | polar\n"), sk::DslError);
  EXPECT_THROW(sk::parse_rules("R1 | are there {X} | - | a {X} . | b {X} . | fuzzy\n"), sk::DslError);
  EXPECT_THROW(sk::parse_rules("R1 | are there {X} | shiny:X | a {X} . | b {X} . | polar\n"), sk::DslError);
  EXPECT_THROW(sk::parse_rules("R1 | are {X} {X} | - | a {X} . | b {X} . | polar\n"), sk::DslError);
  EXPECT_THROW(sk::parse_rules("R1 | are there {X} | - | a {X} . | a {X} . | polar\n"), sk::DslError);
  EXPECT_THROW(sk::parse_rules("R1 | are there {X} | - | a {X:loud} . | b {X} . | polar\n"), sk::DslError);
  EXPECT_TRUE(sk::parse_rules("# only a comment\n\n").empty());
}

TEST(Rules, AnswerPolarity) {
  EXPECT_EQ(sk::answer_polarity(sk::tokenize("no.")), sk::AnswerPolarity::Negative);
  EXPECT_EQ(sk::answer_polarity(sk::tokenize("0.")), sk::AnswerPolarity::Negative);
  EXPECT_EQ(sk::answer_polarity(sk::tokenize("yes it is")), sk::AnswerPolarity::Positive);
  EXPECT_EQ(sk::answer_polarity(sk::tokenize("a little.")), sk::AnswerPolarity::Abstain);
  EXPECT_EQ(sk::answer_polarity(sk::Tokens{}), sk::AnswerPolarity::Abstain);
}

TEST(Rules, NegativeAnswerFlipsTheEntailment) {
  const auto m = sk::match_first(sk::canonical_rules(), sk::tokenize("are there any people?"), sk::tokenize("no."));
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->rule->rule_id, "R1");
  const auto pair = sk::instantiate(*m->rule, m->match, 1, 1);
  EXPECT_EQ(surface(pair.entailment), "there are no people.");
  EXPECT_EQ(surface(pair.contradiction), "there are people.");
  EXPECT_EQ(pair.entailment.truth, sk::Truth::TrueToA);
  EXPECT_EQ(pair.contradiction.polarity_kind, sk::PolarityKind::Contradiction);
  EXPECT_EQ(pair.entailment.question_kind, sk::QuestionKind::PolarNegative);
}

TEST(Rules, ColorRuleKeepsOnlyColorWords) {
  const auto m = sk::match_first(sk::canonical_rules(), sk::tokenize("what color is the dog?"), sk::tokenize("whitish tan."));
  ASSERT_TRUE(m.has_value());
  const auto pair = sk::instantiate(*m->rule, m->match, 1, 2);
  EXPECT_EQ(surface(pair.entailment), "the dog is tan.");
  EXPECT_EQ(surface(pair.contradiction), "the dog is not tan.");
  EXPECT_EQ(pair.entailment.question_kind, sk::QuestionKind::Other);
  EXPECT_FALSE(sk::match_first(sk::canonical_rules(), sk::tokenize("what color is the dog?"), sk::tokenize("hard to say")));
}

TEST(Rules, AlternationAndGates) {
  const auto& rules = sk::canonical_rules();
  EXPECT_TRUE(sk::match_first(rules, sk::tokenize("is the picture in color?"), sk::tokenize("yes")));
  const auto& r11 = rule_named(rules, "R11");
  EXPECT_TRUE(sk::match_rule(r11, sk::tokenize("is it sunny?"), sk::tokenize("yes")));
  EXPECT_FALSE(sk::match_rule(r11, sk::tokenize("is it day?"), sk::tokenize("yes")));
  EXPECT_FALSE(sk::match_rule(r11, sk::tokenize("is it sunny?"), sk::tokenize("a little")));
}

TEST(Rules, FirstDeclaredRuleWins) {
  const auto rules = sk::parse_rules(
      "A | any {X} | - | first {X} . | not first {X} . | polar\n"
      "B | any {X} | - | second {X} . | not second {X} . | polar\n");
  const auto m = sk::match_first(rules, sk::tokenize("any cats?"), sk::tokenize("yes"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->rule->rule_id, "A");
}

TEST(Rules, UnboundTemplateReferenceIsTemplateError) {
  sk::TemplateToken ref;
  ref.is_ref = true;
  ref.text = "Z";
  const std::vector<sk::TemplateToken> tmpl{ref};
  EXPECT_THROW(sk::expand_template(tmpl, sk::RuleMatch{}), sk::TemplateError);
}

// Property: a phrase inserted into "are there ___ ?" is captured verbatim and
// the templates equal plain string assembly around it.
TEST(RulesProperty, CapturedPhraseFillsTemplates) {
  const auto& r1 = rule_named(sk::canonical_rules(), "R1");
  sktest::Gen gen(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto phrase = gen.tokens(1, 4);
    const bool yes = gen.coin();
    const auto q = sk::tokenize("are there " + sk::join_tokens(phrase) + " ?");
    const auto m = sk::match_rule(r1, q, sk::tokenize(yes ? "yes" : "no"));
    ASSERT_TRUE(m.has_value());
    ASSERT_EQ(m->find("X")->tokens, phrase);
    const auto pair = sk::instantiate(r1, *m, 1, 1);
    const std::string pos = "there are " + sk::join_tokens(phrase) + " .";
    const std::string neg = "there are no " + sk::join_tokens(phrase) + " .";
    EXPECT_EQ(sk::join_tokens(pair.entailment.surface), yes ? pos : neg);
    EXPECT_EQ(sk::join_tokens(pair.contradiction.surface), yes ? neg : pos);
  }
}
