#pragma once

// Dialogue, proposition and scoreboard data model plus the gold labelling
// function. A proposition disclosed at turn i is private to the answerer for
// every turn k < i and shared from k = i to the end of the dialogue.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scorekeeping {

using Tokens = std::vector<std::string>;

inline constexpr int kMaxTurns = 10;

enum class Split : std::uint8_t { Train, Valid, Test };

struct QaTurn {
  int index = 0;  // 1..10
  Tokens question;
  Tokens answer;
};

struct Dialogue {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  Tokens caption;  // turn 0
  std::vector<QaTurn> turns;
  Split split = Split::Train;

  /// Number of QA turns (T). Scoreboards have T + 1 rows.
  int num_turns() const noexcept { return static_cast<int>(turns.size()); }
};

/// Throws ConsistencyError when turn numbering, turn count or token content is
/// inconsistent with the dialogue invariants.
void validate(const Dialogue& dialogue);

enum class Truth : std::uint8_t { TrueToA, FalseToA };
enum class Visibility : std::uint8_t { Private, Shared };
enum class PolarityKind : std::uint8_t { Entailment, Contradiction };
enum class QuestionKind : std::uint8_t { PolarPositive, PolarNegative, Other };
enum class Role : std::uint8_t { Answerer, Questioner };
enum class TaskVariant : std::uint8_t { TFxPS, TF, PS, PxTSFS };

struct Proposition {
  std::int64_t id = 0;
  Tokens surface;
  std::int64_t dialogue_id = 0;
  int source_turn = 0;  // 0 = caption
  Truth truth = Truth::TrueToA;
  PolarityKind polarity_kind = PolarityKind::Entailment;
  std::string rule_id;
  QuestionKind question_kind = QuestionKind::Other;
  /// Entailment and contradiction generated together share a pair id.
  std::int64_t pair_id = 0;
};

/// Canonical order: TruePrivate, TrueShared, FalsePrivate, FalseShared.
struct ScoreClass {
  Truth truth = Truth::TrueToA;
  Visibility visibility = Visibility::Private;

  friend bool operator==(const ScoreClass&, const ScoreClass&) = default;

  /// Position in the canonical order (0..3).
  int index() const noexcept;
  static ScoreClass from_index(int index);
  static const std::array<ScoreClass, 4>& all() noexcept;
};

inline constexpr ScoreClass kTruePrivate{Truth::TrueToA, Visibility::Private};
inline constexpr ScoreClass kTrueShared{Truth::TrueToA, Visibility::Shared};
inline constexpr ScoreClass kFalsePrivate{Truth::FalseToA, Visibility::Private};
inline constexpr ScoreClass kFalseShared{Truth::FalseToA, Visibility::Shared};

/// Gold class of `prop` at scoreboard row `turn`. `num_turns` is T of the
/// proposition's dialogue; throws RangeError when turn is outside 0..T.
ScoreClass score_class(const Proposition& prop, Role role, int turn, int num_turns = kMaxTurns);

struct Scoreboard {
  std::int64_t dialogue_id = 0;
  Role role = Role::Answerer;
  int num_rows = 0;  // T + 1
  std::vector<std::int64_t> prop_ids;  // columns
  std::vector<int> source_turns;       // per column
  std::vector<ScoreClass> cells;       // row-major, num_rows x prop_ids.size()

  std::size_t num_cols() const noexcept { return prop_ids.size(); }
  const ScoreClass& at(int row, std::size_t col) const { return cells.at(static_cast<std::size_t>(row) * num_cols() + col); }
};

Scoreboard build_scoreboard(const Dialogue& dialogue, std::span<const Proposition> props, Role role);

// ---- task projection ------------------------------------------------------

int num_labels(TaskVariant task) noexcept;

/// Label index of `c` under `task`.
///   TFxPS  canonical 4-way order
///   TF     True=0, False=1
///   PS     Private=0, Shared=1
///   PxTSFS Private=0, TrueShared=1, FalseShared=2
int project_class(ScoreClass c, TaskVariant task) noexcept;

/// Visibility carried by a label, if the task distinguishes it.
std::optional<Visibility> label_visibility(TaskVariant task, int label);
/// Truth carried by a label, if the task distinguishes it for that label.
std::optional<Truth> label_truth(TaskVariant task, int label);

/// Display names of the labels of a task, in label order.
std::vector<std::string> label_names(TaskVariant task);

/// Questioner cannot tell true from false on private propositions, so the
/// TFxPS and TF tasks are rejected for that role (ConfigError).
void check_task_allowed(TaskVariant task, Role role);

// ---- names ----------------------------------------------------------------

std::string_view to_string(Split s) noexcept;
std::string_view to_string(Truth t) noexcept;
std::string_view to_string(Visibility v) noexcept;
std::string_view to_string(PolarityKind k) noexcept;
std::string_view to_string(QuestionKind k) noexcept;
std::string_view to_string(Role r) noexcept;
std::string_view to_string(TaskVariant t) noexcept;
std::string class_name(ScoreClass c);

Split parse_split(std::string_view s);
Truth parse_truth(std::string_view s);
PolarityKind parse_polarity_kind(std::string_view s);
QuestionKind parse_question_kind(std::string_view s);
Role parse_role(std::string_view s);
TaskVariant parse_task(std::string_view s);

/// Single-letter role tag used in representation keys ("A" / "Q").
std::string_view role_tag(Role r) noexcept;

}  // namespace scorekeeping
