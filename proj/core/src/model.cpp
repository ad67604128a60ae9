#include "scorekeeping/model.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "scorekeeping/errors.hpp"

namespace scorekeeping {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

void validate(const Dialogue& dialogue) {
  const int t = dialogue.num_turns();
  if (t > kMaxTurns) {
    throw ConsistencyError("dialogue " + std::to_string(dialogue.id) + " has " + std::to_string(t) +
                           " turns (max " + std::to_string(kMaxTurns) + ")");
  }
  if (dialogue.split != Split::Test && t != kMaxTurns) {
    throw ConsistencyError("dialogue " + std::to_string(dialogue.id) + " in split " +
                           std::string(to_string(dialogue.split)) + " must have exactly " +
                           std::to_string(kMaxTurns) + " turns");
  }
  for (int i = 0; i < t; ++i) {
    const auto& turn = dialogue.turns[static_cast<std::size_t>(i)];
    if (turn.index != i + 1) {
      throw ConsistencyError("dialogue " + std::to_string(dialogue.id) + ": turn indices must be contiguous from 1");
    }
    if (turn.question.empty() || turn.answer.empty()) {
      throw ConsistencyError("dialogue " + std::to_string(dialogue.id) + " turn " + std::to_string(i + 1) +
                             ": empty question or answer");
    }
  }
}

int ScoreClass::index() const noexcept {
  return (truth == Truth::TrueToA ? 0 : 2) + (visibility == Visibility::Private ? 0 : 1);
}

ScoreClass ScoreClass::from_index(int index) {
  if (index < 0 || index > 3) throw RangeError("score class index out of range: " + std::to_string(index));
  return all()[static_cast<std::size_t>(index)];
}

const std::array<ScoreClass, 4>& ScoreClass::all() noexcept {
  static constexpr std::array<ScoreClass, 4> kAll = {kTruePrivate, kTrueShared, kFalsePrivate, kFalseShared};
  return kAll;
}

ScoreClass score_class(const Proposition& prop, Role /*role*/, int turn, int num_turns) {
  if (turn < 0 || turn > num_turns) {
    throw RangeError("turn " + std::to_string(turn) + " outside 0.." + std::to_string(num_turns));
  }
  return ScoreClass{prop.truth, turn < prop.source_turn ? Visibility::Private : Visibility::Shared};
}

Scoreboard build_scoreboard(const Dialogue& dialogue, std::span<const Proposition> props, Role role) {
  Scoreboard board;
  board.dialogue_id = dialogue.id;
  board.role = role;
  board.num_rows = dialogue.num_turns() + 1;
  for (const auto& p : props) {
    if (p.dialogue_id != dialogue.id) {
      throw ConsistencyError("proposition " + std::to_string(p.id) + " belongs to dialogue " +
                             std::to_string(p.dialogue_id) + ", not " + std::to_string(dialogue.id));
    }
    if (p.source_turn < 0 || p.source_turn > dialogue.num_turns()) {
      throw RangeError("proposition " + std::to_string(p.id) + " has source turn " + std::to_string(p.source_turn) +
                       " beyond the dialogue");
    }
    board.prop_ids.push_back(p.id);
    board.source_turns.push_back(p.source_turn);
  }
  board.cells.reserve(static_cast<std::size_t>(board.num_rows) * props.size());
  for (int m = 0; m < board.num_rows; ++m) {
    for (const auto& p : props) board.cells.push_back(score_class(p, role, m, dialogue.num_turns()));
  }
  return board;
}

int num_labels(TaskVariant task) noexcept {
  switch (task) {
    case TaskVariant::TFxPS: return 4;
    case TaskVariant::TF: return 2;
    case TaskVariant::PS: return 2;
    case TaskVariant::PxTSFS: return 3;
  }
  return 0;
}

int project_class(ScoreClass c, TaskVariant task) noexcept {
  const bool is_true = c.truth == Truth::TrueToA;
  const bool is_private = c.visibility == Visibility::Private;
  switch (task) {
    case TaskVariant::TFxPS: return c.index();
    case TaskVariant::TF: return is_true ? 0 : 1;
    case TaskVariant::PS: return is_private ? 0 : 1;
    case TaskVariant::PxTSFS:
      if (is_private) return 0;
      return is_true ? 1 : 2;
  }
  return 0;
}

std::optional<Visibility> label_visibility(TaskVariant task, int label) {
  if (label < 0 || label >= num_labels(task)) throw RangeError("label out of range: " + std::to_string(label));
  switch (task) {
    case TaskVariant::TFxPS: return ScoreClass::from_index(label).visibility;
    case TaskVariant::TF: return std::nullopt;
    case TaskVariant::PS: return label == 0 ? Visibility::Private : Visibility::Shared;
    case TaskVariant::PxTSFS: return label == 0 ? Visibility::Private : Visibility::Shared;
  }
  return std::nullopt;
}

std::optional<Truth> label_truth(TaskVariant task, int label) {
  if (label < 0 || label >= num_labels(task)) throw RangeError("label out of range: " + std::to_string(label));
  switch (task) {
    case TaskVariant::TFxPS: return ScoreClass::from_index(label).truth;
    case TaskVariant::TF: return label == 0 ? Truth::TrueToA : Truth::FalseToA;
    case TaskVariant::PS: return std::nullopt;
    case TaskVariant::PxTSFS:
      if (label == 0) return std::nullopt;
      return label == 1 ? Truth::TrueToA : Truth::FalseToA;
  }
  return std::nullopt;
}

std::vector<std::string> label_names(TaskVariant task) {
  switch (task) {
    case TaskVariant::TFxPS: return {"true-private", "true-shared", "false-private", "false-shared"};
    case TaskVariant::TF: return {"true", "false"};
    case TaskVariant::PS: return {"private", "shared"};
    case TaskVariant::PxTSFS: return {"private", "true-shared", "false-shared"};
  }
  return {};
}

void check_task_allowed(TaskVariant task, Role role) {
  if (role == Role::Questioner && (task == TaskVariant::TFxPS || task == TaskVariant::TF)) {
    throw ConfigError("task " + std::string(to_string(task)) +
                      " is not applicable to the questioner role (private truth is unknown to Q)");
  }
}

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "?";
}

std::string_view to_string(Truth t) noexcept { return t == Truth::TrueToA ? "true" : "false"; }

std::string_view to_string(Visibility v) noexcept { return v == Visibility::Private ? "private" : "shared"; }

std::string_view to_string(PolarityKind k) noexcept {
  return k == PolarityKind::Entailment ? "entailment" : "contradiction";
}

std::string_view to_string(QuestionKind k) noexcept {
  switch (k) {
    case QuestionKind::PolarPositive: return "polar_positive";
    case QuestionKind::PolarNegative: return "polar_negative";
    case QuestionKind::Other: return "other";
  }
  return "?";
}

std::string_view to_string(Role r) noexcept { return r == Role::Answerer ? "answerer" : "questioner"; }

std::string_view to_string(TaskVariant t) noexcept {
  switch (t) {
    case TaskVariant::TFxPS: return "tfxps";
    case TaskVariant::TF: return "tf";
    case TaskVariant::PS: return "ps";
    case TaskVariant::PxTSFS: return "pxtsfs";
  }
  return "?";
}

std::string class_name(ScoreClass c) {
  return std::string(to_string(c.truth)) + "-" + std::string(to_string(c.visibility));
}

Split parse_split(std::string_view s) {
  const auto v = lower(s);
  if (v == "train") return Split::Train;
  if (v == "valid" || v == "val" || v == "validation") return Split::Valid;
  if (v == "test") return Split::Test;
  throw ConfigError("unknown split: " + std::string(s));
}

Truth parse_truth(std::string_view s) {
  const auto v = lower(s);
  if (v == "true") return Truth::TrueToA;
  if (v == "false") return Truth::FalseToA;
  throw FormatError("unknown truth value: " + std::string(s));
}

PolarityKind parse_polarity_kind(std::string_view s) {
  const auto v = lower(s);
  if (v == "entailment") return PolarityKind::Entailment;
  if (v == "contradiction") return PolarityKind::Contradiction;
  throw FormatError("unknown polarity kind: " + std::string(s));
}

QuestionKind parse_question_kind(std::string_view s) {
  const auto v = lower(s);
  if (v == "polar_positive") return QuestionKind::PolarPositive;
  if (v == "polar_negative") return QuestionKind::PolarNegative;
  if (v == "other") return QuestionKind::Other;
  throw FormatError("unknown question kind: " + std::string(s));
}

Role parse_role(std::string_view s) {
  const auto v = lower(s);
  if (v == "answerer" || v == "a") return Role::Answerer;
  if (v == "questioner" || v == "q") return Role::Questioner;
  throw ConfigError("unknown role: " + std::string(s));
}

TaskVariant parse_task(std::string_view s) {
  const auto v = lower(s);
  if (v == "tfxps") return TaskVariant::TFxPS;
  if (v == "tf") return TaskVariant::TF;
  if (v == "ps") return TaskVariant::PS;
  if (v == "pxtsfs") return TaskVariant::PxTSFS;
  throw ConfigError("unknown task: " + std::string(s));
}

std::string_view role_tag(Role r) noexcept { return r == Role::Answerer ? "A" : "Q"; }

}  // namespace scorekeeping
