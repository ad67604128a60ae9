#include "scorekeeping/rules.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "scorekeeping/errors.hpp"
#include "scorekeeping/tokenize.hpp"

namespace scorekeeping {

namespace {

constexpr std::string_view kCanonicalRules = R"(# Canonical rule set.
# id  | question pattern                    | gates         | positive template            | negative template                   | kind
R1    | are there {X}                       | -             | there are {X:bare} .         | there are no {X:bare} .             | polar
R2    | is there {X}                        | -             | there is {X} .               | there is no {X:bare} .              | polar
R3    | any {X}                             | -             | there {X:be} {X:indef} .     | there {X:be} no {X:bare} .          | polar
R4    | do you see {X}                      | -             | one can see {X:indef} .      | one cannot see any {X:bare} .       | polar
R5    | can you see {X}                     | -             | one can see {X:indef} .      | one cannot see any {X:bare} .       | polar
R6    | what color is {X}                   | -             | {X} is {C} .                 | {X} is not {C} .                    | color
R7    | is this in color                    | -             | the image is in color .      | the image is not in color .         | polar
R7    | is the photo|image|picture in color | -             | the image is in color .      | the image is not in color .         | polar
R8    | is the {X} {W:1}                    | nonpronoun:W  | the {X} is {W} .             | the {X} is not {W} .                | polar
R9    | are {X} {W:1}                       | nonpronoun:W  | the {X:bare} are {W} .       | the {X:bare} are not {W} .          | polar
R10   | do the {X} have {Y}                 | -             | the {X} have {Y} .           | the {X} do not have any {Y:bare} .  | polar
R11   | is it {W:1}                         | adj:W         | it is {W} .                  | it is not {W} .                     | polar
)";

struct Word {
  std::string text;
  std::size_t column = 0;  // 1-based
};

std::vector<Word> split_words(std::string_view line) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t begin = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({std::string(line.substr(begin, i - begin)), begin + 1});
  }
  return out;
}

bool valid_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_braced(std::string_view w) { return w.size() >= 2 && w.front() == '{' && w.back() == '}'; }

// Splits "{NAME:suffix}" into name and suffix (suffix empty when absent).
std::pair<std::string, std::string> split_ref(std::string_view w) {
  const auto inner = w.substr(1, w.size() - 2);
  const auto colon = inner.find(':');
  if (colon == std::string_view::npos) return {std::string(inner), {}};
  return {std::string(inner.substr(0, colon)), std::string(inner.substr(colon + 1))};
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<PatternToken> parse_pattern(std::span<const Word> words, std::size_t line, std::set<std::string>& names) {
  std::vector<PatternToken> out;
  for (const auto& w : words) {
    PatternToken tok;
    if (w.text == "{_}") {
      tok.kind = PatternToken::Kind::Wildcard;
    } else if (is_braced(w.text)) {
      auto [name, suffix] = split_ref(w.text);
      if (!valid_name(name)) throw DslError(line, w.column, "bad capture name '" + name + "'");
      if (!suffix.empty() && suffix != "1") throw DslError(line, w.column, "unknown capture suffix '" + suffix + "'");
      if (!names.insert(name).second) throw DslError(line, w.column, "capture '" + name + "' bound twice");
      tok.kind = PatternToken::Kind::Capture;
      tok.name = std::move(name);
      tok.single = suffix == "1";
    } else {
      tok.kind = PatternToken::Kind::Literal;
      tok.alternatives = split_on(w.text, '|');
      for (const auto& alt : tok.alternatives) {
        if (alt.empty()) throw DslError(line, w.column, "empty alternative in '" + w.text + "'");
      }
      for (auto& alt : tok.alternatives) {
        for (auto& c : alt) {
          if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<Gate> parse_gates(std::span<const Word> words, std::size_t line, const std::set<std::string>& names) {
  std::vector<Gate> out;
  if (words.size() == 1 && words.front().text == "-") return out;
  for (const auto& w : words) {
    for (const auto& item : split_on(w.text, ',')) {
      if (item.empty()) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw DslError(line, w.column, "gate must be name:CAPTURE, got '" + item + "'");
      const auto kind = item.substr(0, colon);
      Gate gate;
      gate.capture = item.substr(colon + 1);
      if (kind == "adj") {
        gate.kind = Gate::Kind::Adjective;
      } else if (kind == "color") {
        gate.kind = Gate::Kind::Color;
      } else if (kind == "nonpronoun") {
        gate.kind = Gate::Kind::NonPronoun;
      } else {
        throw DslError(line, w.column, "unknown gate '" + kind + "'");
      }
      if (!names.contains(gate.capture)) {
        throw DslError(line, w.column, "gate refers to unbound capture '" + gate.capture + "'");
      }
      out.push_back(std::move(gate));
    }
  }
  return out;
}

std::vector<TemplateToken> parse_template(std::span<const Word> words, std::size_t line,
                                          const std::set<std::string>& bound) {
  std::vector<TemplateToken> out;
  for (const auto& w : words) {
    TemplateToken tok;
    if (is_braced(w.text)) {
      auto [name, suffix] = split_ref(w.text);
      if (!valid_name(name)) throw DslError(line, w.column, "bad capture reference '" + w.text + "'");
      if (!bound.contains(name)) throw DslError(line, w.column, "template refers to unbound capture '" + name + "'");
      tok.is_ref = true;
      tok.text = std::move(name);
      if (suffix.empty()) {
        tok.modifier = TemplateToken::Modifier::None;
      } else if (suffix == "bare") {
        tok.modifier = TemplateToken::Modifier::Bare;
      } else if (suffix == "indef") {
        tok.modifier = TemplateToken::Modifier::Indef;
      } else if (suffix == "be") {
        tok.modifier = TemplateToken::Modifier::Be;
      } else {
        throw DslError(line, w.column, "unknown template modifier '" + suffix + "'");
      }
    } else {
      tok.text = w.text;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

bool same_template(const std::vector<TemplateToken>& a, const std::vector<TemplateToken>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const TemplateToken& x, const TemplateToken& y) {
    return x.is_ref == y.is_ref && x.text == y.text && x.modifier == y.modifier;
  });
}

// ---- matching -------------------------------------------------------------

struct Span {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool match_from(std::span<const PatternToken> pattern, std::size_t pi, std::span<const std::string> q,
                std::size_t qi, std::vector<Span>& spans) {
  if (pi == pattern.size()) return qi == q.size();
  const auto& tok = pattern[pi];
  switch (tok.kind) {
    case PatternToken::Kind::Literal: {
      if (qi >= q.size()) return false;
      if (std::find(tok.alternatives.begin(), tok.alternatives.end(), q[qi]) == tok.alternatives.end()) return false;
      return match_from(pattern, pi + 1, q, qi + 1, spans);
    }
    case PatternToken::Kind::Wildcard:
      if (qi >= q.size()) return false;
      return match_from(pattern, pi + 1, q, qi + 1, spans);
    case PatternToken::Kind::Capture: {
      if (qi >= q.size()) return false;
      const std::size_t max_len = tok.single ? 1 : q.size() - qi;
      for (std::size_t len = max_len; len >= 1; --len) {
        spans.push_back({tok.name, qi, qi + len});
        if (match_from(pattern, pi + 1, q, qi + len, spans)) return true;
        spans.pop_back();
      }
      return false;
    }
  }
  return false;
}

bool gate_passes(const Gate& gate, const Capture& cap, const Lexicons& lex) {
  const auto& set = gate.kind == Gate::Kind::Adjective ? lex.adjectives
                    : gate.kind == Gate::Kind::Color   ? lex.colors
                                                       : lex.pronouns;
  const bool want_member = gate.kind != Gate::Kind::NonPronoun;
  return std::all_of(cap.tokens.begin(), cap.tokens.end(),
                     [&](const std::string& t) { return set.contains(t) == want_member; });
}

std::span<const std::string> strip_trailing_punct(std::span<const std::string> tokens) {
  std::size_t n = tokens.size();
  while (n > 0 && is_punctuation(tokens[n - 1])) --n;
  return tokens.first(n);
}

Tokens bare(const Tokens& phrase, const Lexicons& lex) {
  if (phrase.size() > 1 && lex.determiners.contains(phrase.front())) return Tokens(phrase.begin() + 1, phrase.end());
  return phrase;
}

bool starts_with_vowel(const std::string& word) {
  if (word.empty()) return false;
  const char c = word.front();
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

AnswerPolarity answer_polarity(std::span<const std::string> answer, const Lexicons& lex) {
  for (const auto& tok : answer) {
    if (is_punctuation(tok)) continue;
    if (lex.negative_cues.contains(tok)) return AnswerPolarity::Negative;
    if (lex.positive_cues.contains(tok)) return AnswerPolarity::Positive;
    return AnswerPolarity::Abstain;
  }
  return AnswerPolarity::Abstain;
}

const Capture* RuleMatch::find(std::string_view name) const {
  for (const auto& c : captures) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<Rule> parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto words = split_words(line);
    if (words.empty() || words.front().text.starts_with('#')) continue;

    std::vector<std::vector<Word>> fields(1);
    for (const auto& w : words) {
      if (w.text == "|") {
        fields.emplace_back();
      } else {
        fields.back().push_back(w);
      }
    }
    if (fields.size() != 6) {
      throw DslError(line_no, line.size() + 1,
                     "expected 6 fields separated by '|', found " + std::to_string(fields.size()));
    }
    static constexpr std::array<std::string_view, 6> kFieldNames = {"id", "pattern", "gates", "positive template",
                                                                     "negative template", "kind"};
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (fields[f].empty()) throw DslError(line_no, 1, "empty " + std::string(kFieldNames[f]) + " field");
    }
    if (fields[0].size() != 1) throw DslError(line_no, fields[0][1].column, "rule id must be a single word");
    if (fields[5].size() != 1) throw DslError(line_no, fields[5][1].column, "kind must be a single word");

    Rule rule;
    rule.rule_id = fields[0][0].text;
    rule.source_line = line_no;
    std::set<std::string> names;
    rule.question_pattern = parse_pattern(fields[1], line_no, names);
    rule.gates = parse_gates(fields[2], line_no, names);

    const auto& kind = fields[5][0];
    std::set<std::string> bound = names;
    if (kind.text == "polar") {
      rule.answer_condition = AnswerCondition::RequiresPolarity;
    } else if (kind.text == "color") {
      rule.answer_condition = AnswerCondition::ColorExtract;
      if (!bound.insert("C").second) throw DslError(line_no, kind.column, "color rules bind {C}; pattern reuses it");
    } else if (kind.text == "copy") {
      rule.answer_condition = AnswerCondition::PredicateCopy;
      if (!bound.insert("A").second) throw DslError(line_no, kind.column, "copy rules bind {A}; pattern reuses it");
    } else {
      throw DslError(line_no, kind.column, "unknown kind '" + kind.text + "' (polar, color, copy)");
    }
    rule.positive_template = parse_template(fields[3], line_no, bound);
    rule.negative_template = parse_template(fields[4], line_no, bound);
    if (same_template(rule.positive_template, rule.negative_template)) {
      throw DslError(line_no, fields[4].front().column, "positive and negative templates are identical");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<Rule> load_rules(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open rules file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str());
}

std::string_view canonical_rules_text() noexcept { return kCanonicalRules; }

const std::vector<Rule>& canonical_rules() {
  static const std::vector<Rule> kRules = parse_rules(kCanonicalRules);
  return kRules;
}

std::optional<RuleMatch> match_rule(const Rule& rule, std::span<const std::string> question,
                                    std::span<const std::string> answer, const Lexicons& lex) {
  const auto q = strip_trailing_punct(question);
  std::vector<Span> spans;
  if (!match_from(rule.question_pattern, 0, q, 0, spans)) return std::nullopt;

  RuleMatch match;
  for (const auto& s : spans) {
    match.captures.push_back({s.name, Tokens(q.begin() + static_cast<std::ptrdiff_t>(s.begin),
                                             q.begin() + static_cast<std::ptrdiff_t>(s.end))});
  }
  for (const auto& gate : rule.gates) {
    const auto* cap = match.find(gate.capture);
    if (cap == nullptr || !gate_passes(gate, *cap, lex)) return std::nullopt;
  }

  match.polarity = answer_polarity(answer, lex);
  switch (rule.answer_condition) {
    case AnswerCondition::RequiresPolarity:
      if (match.polarity == AnswerPolarity::Abstain) return std::nullopt;
      break;
    case AnswerCondition::ColorExtract: {
      Tokens colors;
      for (const auto& tok : answer) {
        if (!lex.colors.contains(tok)) continue;
        if (!colors.empty()) colors.emplace_back("and");
        colors.push_back(tok);
      }
      if (colors.empty()) return std::nullopt;
      match.captures.push_back({"C", std::move(colors)});
      break;
    }
    case AnswerCondition::PredicateCopy: {
      Tokens words;
      for (const auto& tok : answer) {
        if (!is_punctuation(tok)) words.push_back(tok);
      }
      if (words.empty()) return std::nullopt;
      match.captures.push_back({"A", std::move(words)});
      break;
    }
  }
  return match;
}

std::optional<FirstMatch> match_first(std::span<const Rule> rules, std::span<const std::string> question,
                                      std::span<const std::string> answer, const Lexicons& lex) {
  for (const auto& rule : rules) {
    if (auto m = match_rule(rule, question, answer, lex)) return FirstMatch{&rule, std::move(*m)};
  }
  return std::nullopt;
}

Tokens expand_template(std::span<const TemplateToken> tmpl, const RuleMatch& match, const Lexicons& lex) {
  Tokens out;
  for (const auto& tok : tmpl) {
    if (!tok.is_ref) {
      out.push_back(tok.text);
      continue;
    }
    const auto* cap = match.find(tok.text);
    if (cap == nullptr || cap->tokens.empty()) throw TemplateError("unbound capture {" + tok.text + "}");
    switch (tok.modifier) {
      case TemplateToken::Modifier::None:
        out.insert(out.end(), cap->tokens.begin(), cap->tokens.end());
        break;
      case TemplateToken::Modifier::Bare: {
        const auto b = bare(cap->tokens, lex);
        out.insert(out.end(), b.begin(), b.end());
        break;
      }
      case TemplateToken::Modifier::Indef: {
        const auto b = bare(cap->tokens, lex);
        if (!looks_plural(lex, b)) out.emplace_back(starts_with_vowel(b.front()) ? "an" : "a");
        out.insert(out.end(), b.begin(), b.end());
        break;
      }
      case TemplateToken::Modifier::Be:
        out.emplace_back(looks_plural(lex, bare(cap->tokens, lex)) ? "are" : "is");
        break;
    }
  }
  return out;
}

PropositionPair instantiate(const Rule& rule, const RuleMatch& match, std::int64_t dialogue_id, int source_turn,
                            const Lexicons& lex) {
  const bool polar = rule.answer_condition == AnswerCondition::RequiresPolarity;
  const bool negative = polar && match.polarity == AnswerPolarity::Negative;
  QuestionKind kind = QuestionKind::Other;
  if (polar) kind = negative ? QuestionKind::PolarNegative : QuestionKind::PolarPositive;

  auto make = [&](const std::vector<TemplateToken>& tmpl, Truth truth, PolarityKind pk) {
    Proposition p;
    p.surface = expand_template(tmpl, match, lex);
    p.dialogue_id = dialogue_id;
    p.source_turn = source_turn;
    p.truth = truth;
    p.polarity_kind = pk;
    p.rule_id = rule.rule_id;
    p.question_kind = kind;
    return p;
  };
  const auto& ent_tmpl = negative ? rule.negative_template : rule.positive_template;
  const auto& con_tmpl = negative ? rule.positive_template : rule.negative_template;
  return {make(ent_tmpl, Truth::TrueToA, PolarityKind::Entailment),
          make(con_tmpl, Truth::FalseToA, PolarityKind::Contradiction)};
}

}  // namespace scorekeeping
