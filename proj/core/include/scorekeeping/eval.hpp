#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "scorekeeping/dataset.hpp"
#include "scorekeeping/model.hpp"

namespace scorekeeping {

/// One scored datapoint with the proposition metadata the breakdowns need.
struct EvalRecord {
  std::int64_t dialogue_id = 0;
  int rep_turn = 0;
  std::int64_t prop_id = 0;
  int source_turn = 0;
  QuestionKind question_kind = QuestionKind::Other;
  std::string surface;  // space-joined tokens
  int gold = 0;
  int pred = 0;
};

/// Throws ConsistencyError for a proposition id that cannot be resolved and
/// ShapeError when the counts differ.
std::vector<EvalRecord> make_records(std::span<const Datapoint> points, std::span<const Proposition> props,
                                     std::span<const int> gold, std::span<const int> pred);

/// Restricts accuracy to one representation turn when set.
struct TurnFilter {
  std::optional<int> turn;
};

/// Throws EmptySubsetError when nothing passes the filter.
double accuracy(std::span<const EvalRecord> records, TurnFilter filter = {});

/// counts[gold][pred]. Throws RangeError on a label outside 0..n_labels-1.
std::vector<std::vector<std::size_t>> confusion(std::span<const EvalRecord> records, int n_labels);

struct GroupAccuracy {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy() const noexcept { return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0; }
};

struct Breakdowns {
  /// (question kind, source turn) -> accuracy.
  std::map<std::pair<QuestionKind, int>, GroupAccuracy> by_kind_and_source_turn;
  std::map<QuestionKind, GroupAccuracy> by_kind;
  std::map<int, GroupAccuracy> by_source_turn;
  /// Representation turn -> mean over dialogues of the within-dialogue accuracy.
  std::map<int, double> dialogue_mean_by_rep_turn;
  /// Absent when the group is empty.
  std::optional<GroupAccuracy> seen;
  std::optional<GroupAccuracy> unseen;
};

/// `train_surfaces` holds the space-joined surfaces of the training
/// propositions; seen/unseen are omitted when it is empty.
Breakdowns breakdowns(std::span<const EvalRecord> records, const std::set<std::string>& train_surfaces);

/// Scoreboard of task labels. Columns follow proposition id order.
struct LabelBoard {
  std::int64_t dialogue_id = 0;
  TaskVariant task = TaskVariant::TFxPS;
  int num_rows = 0;
  std::vector<std::int64_t> prop_ids;
  std::vector<int> source_turns;
  std::vector<int> labels;  // row-major, num_rows x cols

  std::size_t num_cols() const noexcept { return prop_ids.size(); }
  int at(int row, std::size_t col) const { return labels.at(static_cast<std::size_t>(row) * num_cols() + col); }
};

LabelBoard project_board(const Scoreboard& board, TaskVariant task);

/// Rebuilds per-dialogue boards from records, using either the predicted or
/// the gold labels. Throws ConsistencyError when a dialogue lacks a cell for
/// some (row, proposition) pair or has one twice.
std::vector<LabelBoard> boards_from_records(std::span<const EvalRecord> records, std::span<const Dialogue> dialogues,
                                            TaskVariant task, bool use_predictions);

struct ConsistencyCounts {
  std::size_t columns = 0;
  std::size_t shift_at_correct_turn = 0;
  std::size_t only_correct_shift = 0;
  std::size_t truth_stable = 0;

  ConsistencyCounts& operator+=(const ConsistencyCounts& o) noexcept;
};

/// Fractions; a field is absent when the task cannot express it.
struct ConsistencyMetrics {
  std::optional<double> shift_at_correct_turn;
  std::optional<double> only_correct_shift;
  std::optional<double> truth_stable;
};

/// Per-column checks of `pred` against the source turns recorded in `gold`.
/// Throws ShapeError when the boards differ in shape or columns.
ConsistencyCounts consistency_counts(const LabelBoard& pred, const LabelBoard& gold);
ConsistencyMetrics consistency_metrics(const ConsistencyCounts& counts, TaskVariant task);
ConsistencyMetrics consistency(const LabelBoard& pred, const LabelBoard& gold);

struct PermutationResult {
  double observed = 0.0;  // mean(a) - mean(b)
  double p_value = 1.0;
  std::size_t shuffles = 0;
};

/// Paired approximate permutation test on 0/1 correctness indicators.
/// Throws ShapeError on a length mismatch, ConfigError for zero shuffles or an
/// empty sample.
PermutationResult permutation_test(std::span<const std::uint8_t> correct_a, std::span<const std::uint8_t> correct_b,
                                   std::size_t shuffles = 1000, std::uint64_t seed = 54321);

struct EvalReport {
  TaskVariant task = TaskVariant::TFxPS;
  Role role = Role::Answerer;
  std::size_t datapoints = 0;
  double accuracy = 0.0;
  std::optional<double> turn5_accuracy;
  std::optional<int> turn_filter;
  std::optional<double> filtered_accuracy;
  std::vector<std::vector<std::size_t>> confusion;
  std::optional<std::vector<std::vector<std::size_t>>> turn5_confusion;
  Breakdowns breakdowns;
  std::optional<ConsistencyCounts> consistency;
};

EvalReport build_report(std::span<const EvalRecord> records, TaskVariant task, Role role,
                        const std::set<std::string>& train_surfaces, std::optional<int> turn_filter,
                        std::span<const Dialogue> dialogues);

std::string report_to_json(const EvalReport& report);

/// Rows are turns, columns proposition surfaces, cells label names.
std::string board_to_csv(const LabelBoard& board, std::span<const Proposition> props);

}  // namespace scorekeeping
