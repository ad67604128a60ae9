#include "scorekeeping/eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "scorekeeping/errors.hpp"
#include "scorekeeping/rng.hpp"
#include "scorekeeping/tokenize.hpp"

namespace scorekeeping {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kReportTurn = 5;

Json group_json(const GroupAccuracy& g) {
  return {{"count", g.count}, {"correct", g.correct}, {"accuracy", g.accuracy()}};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Boards for every dialogue, or nullopt when some dialogue is incomplete.
std::optional<std::vector<LabelBoard>> try_boards(std::span<const EvalRecord> records,
                                                  std::span<const Dialogue> dialogues, TaskVariant task,
                                                  bool use_predictions) {
  try {
    return boards_from_records(records, dialogues, task, use_predictions);
  } catch (const ConsistencyError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<EvalRecord> make_records(std::span<const Datapoint> points, std::span<const Proposition> props,
                                     std::span<const int> gold, std::span<const int> pred) {
  if (points.size() != gold.size() || points.size() != pred.size()) {
    throw ShapeError("datapoint, gold and prediction counts differ");
  }
  std::unordered_map<std::int64_t, const Proposition*> by_id;
  for (const auto& p : props) by_id.emplace(p.id, &p);
  std::vector<EvalRecord> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = by_id.find(points[i].prop_id);
    if (it == by_id.end()) throw ConsistencyError("unknown proposition id " + std::to_string(points[i].prop_id));
    const auto& p = *it->second;
    out.push_back({points[i].rep.dialogue_id, points[i].rep.turn, p.id, p.source_turn, p.question_kind,
                   join_tokens(p.surface), gold[i], pred[i]});
  }
  return out;
}

double accuracy(std::span<const EvalRecord> records, TurnFilter filter) {
  std::size_t n = 0;
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (filter.turn && r.rep_turn != *filter.turn) continue;
    ++n;
    hits += r.gold == r.pred ? 1 : 0;
  }
  if (n == 0) {
    throw EmptySubsetError(filter.turn ? "no datapoints at turn " + std::to_string(*filter.turn)
                                       : std::string("no datapoints to score"));
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<std::vector<std::size_t>> confusion(std::span<const EvalRecord> records, int n_labels) {
  if (n_labels <= 0) throw RangeError("label count must be positive");
  std::vector<std::vector<std::size_t>> m(static_cast<std::size_t>(n_labels),
                                          std::vector<std::size_t>(static_cast<std::size_t>(n_labels), 0));
  for (const auto& r : records) {
    if (r.gold < 0 || r.gold >= n_labels || r.pred < 0 || r.pred >= n_labels) {
      throw RangeError("label out of range in confusion matrix");
    }
    ++m[static_cast<std::size_t>(r.gold)][static_cast<std::size_t>(r.pred)];
  }
  return m;
}

Breakdowns breakdowns(std::span<const EvalRecord> records, const std::set<std::string>& train_surfaces) {
  Breakdowns b;
  std::map<int, std::map<std::int64_t, GroupAccuracy>> per_turn_dialogue;
  GroupAccuracy seen;
  GroupAccuracy unseen;
  for (const auto& r : records) {
    const std::size_t hit = r.gold == r.pred ? 1 : 0;
    auto add = [hit](GroupAccuracy& g) {
      ++g.count;
      g.correct += hit;
    };
    add(b.by_kind_and_source_turn[{r.question_kind, r.source_turn}]);
    add(b.by_kind[r.question_kind]);
    add(b.by_source_turn[r.source_turn]);
    add(per_turn_dialogue[r.rep_turn][r.dialogue_id]);
    if (!train_surfaces.empty()) add(train_surfaces.contains(r.surface) ? seen : unseen);
  }
  for (const auto& [turn, dialogues] : per_turn_dialogue) {
    double sum = 0.0;
    for (const auto& [id, g] : dialogues) sum += g.accuracy();
    b.dialogue_mean_by_rep_turn[turn] = sum / static_cast<double>(dialogues.size());
  }
  if (seen.count > 0) b.seen = seen;
  if (unseen.count > 0) b.unseen = unseen;
  return b;
}

LabelBoard project_board(const Scoreboard& board, TaskVariant task) {
  LabelBoard out;
  out.dialogue_id = board.dialogue_id;
  out.task = task;
  out.num_rows = board.num_rows;
  out.prop_ids = board.prop_ids;
  out.source_turns = board.source_turns;
  out.labels.reserve(board.cells.size());
  for (const auto& c : board.cells) out.labels.push_back(project_class(c, task));
  return out;
}

std::vector<LabelBoard> boards_from_records(std::span<const EvalRecord> records, std::span<const Dialogue> dialogues,
                                            TaskVariant task, bool use_predictions) {
  std::unordered_map<std::int64_t, int> rows_of;
  for (const auto& d : dialogues) rows_of.emplace(d.id, d.num_turns() + 1);

  struct Pending {
    std::map<std::int64_t, int> source;  // prop id -> source turn
    std::map<std::pair<int, std::int64_t>, int> cells;
  };
  std::map<std::int64_t, Pending> pending;
  for (const auto& r : records) {
    if (!rows_of.contains(r.dialogue_id)) {
      throw ConsistencyError("record for unknown dialogue " + std::to_string(r.dialogue_id));
    }
    auto& p = pending[r.dialogue_id];
    p.source[r.prop_id] = r.source_turn;
    if (!p.cells.emplace(std::pair{r.rep_turn, r.prop_id}, use_predictions ? r.pred : r.gold).second) {
      throw ConsistencyError("duplicate cell in dialogue " + std::to_string(r.dialogue_id));
    }
  }

  std::vector<LabelBoard> out;
  for (auto& [id, p] : pending) {
    LabelBoard board;
    board.dialogue_id = id;
    board.task = task;
    board.num_rows = rows_of.at(id);
    for (const auto& [prop, src] : p.source) {
      board.prop_ids.push_back(prop);
      board.source_turns.push_back(src);
    }
    if (p.cells.size() != static_cast<std::size_t>(board.num_rows) * board.num_cols()) {
      throw ConsistencyError("dialogue " + std::to_string(id) + " has an incomplete scoreboard");
    }
    board.labels.reserve(p.cells.size());
    for (int row = 0; row < board.num_rows; ++row) {
      for (auto prop : board.prop_ids) {
        auto it = p.cells.find({row, prop});
        if (it == p.cells.end()) {
          throw ConsistencyError("dialogue " + std::to_string(id) + " lacks row " + std::to_string(row));
        }
        board.labels.push_back(it->second);
      }
    }
    out.push_back(std::move(board));
  }
  return out;
}

ConsistencyCounts& ConsistencyCounts::operator+=(const ConsistencyCounts& o) noexcept {
  columns += o.columns;
  shift_at_correct_turn += o.shift_at_correct_turn;
  only_correct_shift += o.only_correct_shift;
  truth_stable += o.truth_stable;
  return *this;
}

ConsistencyCounts consistency_counts(const LabelBoard& pred, const LabelBoard& gold) {
  if (pred.task != gold.task || pred.num_rows != gold.num_rows || pred.prop_ids != gold.prop_ids ||
      pred.labels.size() != gold.labels.size()) {
    throw ShapeError("predicted and gold scoreboards differ in shape");
  }
  const TaskVariant task = pred.task;
  ConsistencyCounts c;
  for (std::size_t col = 0; col < pred.num_cols(); ++col) {
    ++c.columns;
    const int src = gold.source_turns[col];
    if (src < 0 || src >= pred.num_rows) throw RangeError("source turn outside the scoreboard");

    std::vector<std::optional<Visibility>> vis;
    std::vector<std::optional<Truth>> truth;
    for (int row = 0; row < pred.num_rows; ++row) {
      vis.push_back(label_visibility(task, pred.at(row, col)));
      truth.push_back(label_truth(task, pred.at(row, col)));
    }

    const bool shift = src == 0 ? vis[0] == Visibility::Shared
                                : vis[static_cast<std::size_t>(src - 1)] == Visibility::Private &&
                                      vis[static_cast<std::size_t>(src)] == Visibility::Shared;
    bool only = true;
    for (int row = 0; row < pred.num_rows; ++row) {
      const Visibility expected = row < src ? Visibility::Private : Visibility::Shared;
      if (vis[static_cast<std::size_t>(row)] != expected) only = false;
    }
    const bool stable = truth[0].has_value() &&
                        std::all_of(truth.begin(), truth.end(), [&](const auto& t) { return t == truth[0]; });
    c.shift_at_correct_turn += shift ? 1 : 0;
    c.only_correct_shift += only ? 1 : 0;
    c.truth_stable += stable ? 1 : 0;
  }
  return c;
}

ConsistencyMetrics consistency_metrics(const ConsistencyCounts& counts, TaskVariant task) {
  ConsistencyMetrics m;
  if (counts.columns == 0) return m;
  const auto n = static_cast<double>(counts.columns);
  if (task != TaskVariant::TF) {
    m.shift_at_correct_turn = static_cast<double>(counts.shift_at_correct_turn) / n;
    m.only_correct_shift = static_cast<double>(counts.only_correct_shift) / n;
  }
  if (task == TaskVariant::TFxPS || task == TaskVariant::TF) {
    m.truth_stable = static_cast<double>(counts.truth_stable) / n;
  }
  return m;
}

ConsistencyMetrics consistency(const LabelBoard& pred, const LabelBoard& gold) {
  return consistency_metrics(consistency_counts(pred, gold), pred.task);
}

PermutationResult permutation_test(std::span<const std::uint8_t> correct_a, std::span<const std::uint8_t> correct_b,
                                   std::size_t shuffles, std::uint64_t seed) {
  if (correct_a.size() != correct_b.size()) throw ShapeError("paired samples differ in length");
  if (correct_a.empty()) throw ConfigError("permutation test needs at least one pair");
  if (shuffles == 0) throw ConfigError("permutation test needs at least one shuffle");

  // Per-pair differences in {-1, 0, 1}; the statistic is their sum over n.
  std::vector<int> diff(correct_a.size());
  long long observed = 0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (correct_a[i] > 1 || correct_b[i] > 1) throw RangeError("correctness indicators must be 0 or 1");
    diff[i] = static_cast<int>(correct_a[i]) - static_cast<int>(correct_b[i]);
    observed += diff[i];
  }
  const long long observed_abs = std::llabs(observed);

  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    long long stat = 0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
      if (i % 64 == 0) bits = rng();
      stat += (bits & 1u) ? -diff[i] : diff[i];
      bits >>= 1;
    }
    if (std::llabs(stat) >= observed_abs) ++extreme;
  }
  PermutationResult r;
  r.observed = static_cast<double>(observed) / static_cast<double>(diff.size());
  r.p_value = static_cast<double>(extreme + 1) / static_cast<double>(shuffles + 1);
  r.shuffles = shuffles;
  return r;
}

EvalReport build_report(std::span<const EvalRecord> records, TaskVariant task, Role role,
                        const std::set<std::string>& train_surfaces, std::optional<int> turn_filter,
                        std::span<const Dialogue> dialogues) {
  EvalReport report;
  report.task = task;
  report.role = role;
  report.datapoints = records.size();
  report.accuracy = accuracy(records);
  report.confusion = confusion(records, num_labels(task));
  const bool has_turn5 =
      std::any_of(records.begin(), records.end(), [](const EvalRecord& r) { return r.rep_turn == kReportTurn; });
  if (has_turn5) {
    report.turn5_accuracy = accuracy(records, {kReportTurn});
    std::vector<EvalRecord> at5;
    for (const auto& r : records) {
      if (r.rep_turn == kReportTurn) at5.push_back(r);
    }
    report.turn5_confusion = confusion(at5, num_labels(task));
  }
  if (turn_filter) {
    report.turn_filter = turn_filter;
    report.filtered_accuracy = accuracy(records, {turn_filter});
  }
  report.breakdowns = breakdowns(records, train_surfaces);
  if (!dialogues.empty()) {
    auto pred = try_boards(records, dialogues, task, true);
    auto gold = try_boards(records, dialogues, task, false);
    if (pred && gold) {
      ConsistencyCounts total;
      for (std::size_t i = 0; i < pred->size(); ++i) total += consistency_counts((*pred)[i], (*gold)[i]);
      report.consistency = total;
    }
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  const auto names = label_names(report.task);
  Json j;
  j["task"] = to_string(report.task);
  j["role"] = to_string(report.role);
  j["labels"] = names;
  j["datapoints"] = report.datapoints;
  j["accuracy"] = report.accuracy;
  j["turn5_accuracy"] = optional_json(report.turn5_accuracy);
  j["turn_filter"] = report.turn_filter ? Json(*report.turn_filter) : Json(nullptr);
  j["filtered_accuracy"] = optional_json(report.filtered_accuracy);
  j["confusion"] = report.confusion;
  j["turn5_confusion"] = report.turn5_confusion ? Json(*report.turn5_confusion) : Json(nullptr);

  const auto& b = report.breakdowns;
  Json kinds = Json::object();
  for (const auto& [kind, g] : b.by_kind) kinds[std::string(to_string(kind))] = group_json(g);
  j["by_question_kind"] = kinds;
  Json kind_turn = Json::array();
  for (const auto& [key, g] : b.by_kind_and_source_turn) {
    Json row = {{"question_kind", to_string(key.first)}, {"source_turn", key.second}};
    row.update(group_json(g));
    kind_turn.push_back(row);
  }
  j["by_question_kind_and_source_turn"] = kind_turn;
  Json source = Json::array();
  for (const auto& [turn, g] : b.by_source_turn) {
    Json row = {{"source_turn", turn}};
    row.update(group_json(g));
    source.push_back(row);
  }
  j["by_source_turn"] = source;
  Json rep = Json::array();
  for (const auto& [turn, mean] : b.dialogue_mean_by_rep_turn) {
    rep.push_back({{"rep_turn", turn}, {"dialogue_mean_accuracy", mean}});
  }
  j["dialogue_mean_by_rep_turn"] = rep;
  j["seen"] = b.seen ? group_json(*b.seen) : Json(nullptr);
  j["unseen"] = b.unseen ? group_json(*b.unseen) : Json(nullptr);

  if (report.consistency) {
    const auto m = consistency_metrics(*report.consistency, report.task);
    j["consistency"] = {{"columns", report.consistency->columns},
                        {"shift_at_correct_turn", optional_json(m.shift_at_correct_turn)},
                        {"only_correct_shift", optional_json(m.only_correct_shift)},
                        {"truth_stable", optional_json(m.truth_stable)}};
  } else {
    j["consistency"] = nullptr;
  }
  return j.dump(2);
}

std::string board_to_csv(const LabelBoard& board, std::span<const Proposition> props) {
  std::unordered_map<std::int64_t, const Proposition*> by_id;
  for (const auto& p : props) by_id.emplace(p.id, &p);
  const auto names = label_names(board.task);
  std::ostringstream out;
  out << "turn";
  for (auto id : board.prop_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ConsistencyError("unknown proposition id " + std::to_string(id));
    out << ',' << csv_escape(detokenize(it->second->surface));
  }
  out << '\n';
  for (int row = 0; row < board.num_rows; ++row) {
    out << row;
    for (std::size_t col = 0; col < board.num_cols(); ++col) {
      const int label = board.at(row, col);
      if (label < 0 || static_cast<std::size_t>(label) >= names.size()) throw RangeError("label out of range");
      out << ',' << names[static_cast<std::size_t>(label)];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace scorekeeping
