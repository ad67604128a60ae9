#include "scorekeeping/train.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "scorekeeping/errors.hpp"

namespace scorekeeping {

namespace {

using Eigen::Index;

constexpr std::size_t kPredictChunk = 4096;
constexpr std::uint64_t kDropoutStream = 0x64726f706f7574ULL;
constexpr std::uint64_t kControlStream = 0x636f6e74726f6cULL;

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& index, std::vector<std::span<const float>>& cols,
                     const std::string& key, const VectorStore& store) {
  auto it = index.find(key);
  if (it != index.end()) return it->second;
  cols.push_back(store.lookup(key));
  const auto id = static_cast<std::uint32_t>(cols.size() - 1);
  index.emplace(key, id);
  return id;
}

Eigen::MatrixXd to_matrix(const std::vector<std::span<const float>>& cols, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Index>(dim), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Index>(i), static_cast<Index>(j)) = cols[j][i];
  }
  return m;
}

}  // namespace

std::string_view to_string(ControlMode c) noexcept {
  switch (c) {
    case ControlMode::None: return "none";
    case ControlMode::NullR: return "null-r";
    case ControlMode::RandomR: return "random-r";
  }
  return "none";
}

ControlMode parse_control(std::string_view s) {
  if (s == "none") return ControlMode::None;
  if (s == "null-r") return ControlMode::NullR;
  if (s == "random-r") return ControlMode::RandomR;
  throw ConfigError("unknown control mode: " + std::string(s));
}

ProbeData assemble(std::span<const Datapoint> points, std::span<const Proposition> props, const VectorStore& reps,
                   const VectorStore& prop_vectors, TaskVariant task, Role role) {
  if (reps.dim() == 0 || prop_vectors.dim() == 0) throw ShapeError("empty embedding store");
  std::unordered_map<std::int64_t, const Proposition*> by_id;
  for (const auto& p : props) by_id.emplace(p.id, &p);

  std::unordered_map<std::string, std::uint32_t> rep_ids;
  std::unordered_map<std::string, std::uint32_t> prop_ids;
  std::vector<std::span<const float>> rep_cols;
  std::vector<std::span<const float>> prop_cols;

  ProbeData data;
  data.points.assign(points.begin(), points.end());
  data.rep_index.reserve(points.size());
  data.prop_index.reserve(points.size());
  data.labels.reserve(points.size());
  for (const auto& dp : points) {
    if (dp.rep.role != role) {
      throw ConsistencyError("datapoint for role " + std::string(to_string(dp.rep.role)) + " in a " +
                             std::string(to_string(role)) + " dataset");
    }
    auto it = by_id.find(dp.prop_id);
    if (it == by_id.end()) throw ConsistencyError("unknown proposition id " + std::to_string(dp.prop_id));
    data.rep_index.push_back(intern(rep_ids, rep_cols, rep_key(dp.rep), reps));
    data.prop_index.push_back(intern(prop_ids, prop_cols, prop_key(it->second->surface), prop_vectors));
    data.labels.push_back(project_class(dp.gold, task));
  }
  data.reps = to_matrix(rep_cols, reps.dim());
  data.props = to_matrix(prop_cols, prop_vectors.dim());
  return data;
}

void fill_batch(const ProbeData& data, std::span<const std::size_t> rows, ControlMode control, Rng* rng,
                Eigen::MatrixXd& out) {
  const Index rd = data.reps.rows();
  const Index pd = data.props.rows();
  out.resize(rd + pd, static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto col = static_cast<Index>(j);
    const std::size_t row = rows[j];
    switch (control) {
      case ControlMode::None:
        out.col(col).head(rd) = data.reps.col(data.rep_index[row]);
        break;
      case ControlMode::NullR:
        out.col(col).head(rd).setZero();
        break;
      case ControlMode::RandomR:
        if (rng == nullptr) throw ConfigError("random control requires a generator");
        for (Index i = 0; i < rd; ++i) out(i, col) = uniform_real(*rng, -1.0, 1.0);
        break;
    }
    out.col(col).tail(pd) = data.props.col(data.prop_index[row]);
  }
}

void TrainConfig::validate() const {
  check_task_allowed(task, role);
  if (hidden == 0) throw ConfigError("hidden size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (!(clip_norm > 0.0)) throw ConfigError("clip norm must be positive");
}

TrainResult train(const ProbeData& train_data, const ProbeData& valid_data, const TrainConfig& config) {
  config.validate();
  if (train_data.size() == 0) throw EmptySubsetError("training set is empty");
  if (valid_data.size() == 0) throw EmptySubsetError("validation set is empty");
  if (train_data.reps.rows() != valid_data.reps.rows() || train_data.props.rows() != valid_data.props.rows()) {
    throw ShapeError("training and validation embeddings differ in dimension");
  }

  ProbeShape shape;
  shape.rep_dim = static_cast<std::size_t>(train_data.reps.rows());
  shape.prop_dim = static_cast<std::size_t>(train_data.props.rows());
  shape.hidden = config.hidden;
  shape.n_labels = static_cast<std::size_t>(num_labels(config.task));

  Rng init_rng(config.seed);
  ProbeModel model(shape, init_rng);
  AdamState adam(shape, config.lr);
  ProbeParams grads = ProbeParams::zeros(shape);
  Rng dropout_rng(config.seed ^ kDropoutStream);

  TrainResult result;
  result.best_valid_accuracy = -1.0;
  std::vector<std::size_t> order(train_data.size());
  Eigen::MatrixXd batch;
  std::vector<int> labels;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(config.seed ^ static_cast<std::uint64_t>(epoch));
    shuffle(std::span(order), shuffle_rng);
    Rng control_rng(mix64(config.seed ^ kControlStream) ^ static_cast<std::uint64_t>(epoch));

    double loss_sum = 0.0;
    double max_norm = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      fill_batch(train_data, rows, config.control, &control_rng, batch);
      labels.clear();
      for (auto r : rows) labels.push_back(train_data.labels[r]);
      const double loss = loss_and_gradients(model, batch, labels, config.dropout, &dropout_rng, grads);
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite loss in epoch " + std::to_string(epoch));
      }
      const double norm = clip_gradients(grads, config.clip_norm);
      if (!std::isfinite(norm)) throw NumericalError("non-finite gradient in epoch " + std::to_string(epoch));
      max_norm = std::max(max_norm, norm);
      adam_step(model, grads, adam);
      loss_sum += loss * static_cast<double>(rows.size());
    }

    const ControlMode eval_control = config.control_at_eval ? config.control : ControlMode::None;
    const auto predicted = predict(model, valid_data, eval_control, config.seed ^ kControlStream);
    const double acc = accuracy_of(predicted, valid_data.labels);
    result.history.push_back({epoch, loss_sum / static_cast<double>(order.size()), acc, max_norm});
    if (acc > result.best_valid_accuracy) {
      result.best_valid_accuracy = acc;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

std::vector<int> predict(const ProbeModel& model, const ProbeData& data, ControlMode control,
                         std::uint64_t control_seed) {
  std::vector<int> out;
  out.reserve(data.size());
  Rng rng(control_seed);
  std::vector<std::size_t> rows;
  Eigen::MatrixXd batch;
  for (std::size_t start = 0; start < data.size(); start += kPredictChunk) {
    const std::size_t end = std::min(data.size(), start + kPredictChunk);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    fill_batch(data, rows, control, &rng, batch);
    const Eigen::MatrixXd logits = forward_logits(model, batch);
    for (Index j = 0; j < logits.cols(); ++j) {
      Index best = 0;
      for (Index i = 1; i < logits.rows(); ++i) {
        if (logits(i, j) > logits(best, j)) best = i;
      }
      out.push_back(static_cast<int>(best));
    }
  }
  return out;
}

double accuracy_of(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) throw ShapeError("prediction and gold counts differ");
  if (gold.empty()) throw EmptySubsetError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

std::string history_to_json(const TrainResult& result, const TrainConfig& config) {
  nlohmann::ordered_json j;
  j["task"] = to_string(config.task);
  j["role"] = to_string(config.role);
  j["control"] = to_string(config.control);
  j["best_epoch"] = result.best_epoch;
  j["best_valid_accuracy"] = result.best_valid_accuracy;
  auto& epochs = j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : result.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"valid_accuracy", e.valid_accuracy},
                      {"max_grad_norm", e.max_grad_norm}});
  }
  return j.dump(2);
}

}  // namespace scorekeeping
