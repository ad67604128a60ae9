#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scorekeeping/dataset.hpp"
#include "scorekeeping/embed.hpp"
#include "scorekeeping/probe.hpp"

namespace scorekeeping {

/// NullR replaces r by zeros; RandomR draws r uniformly from [-1, 1] per
/// datapoint and epoch.
enum class ControlMode : std::uint8_t { None, NullR, RandomR };

std::string_view to_string(ControlMode c) noexcept;
ControlMode parse_control(std::string_view s);

/// Datapoints resolved against the embedding stores. Each distinct
/// representation and proposition vector is stored once.
struct ProbeData {
  Eigen::MatrixXd reps;   // rep_dim x distinct representations
  Eigen::MatrixXd props;  // prop_dim x distinct propositions
  std::vector<std::uint32_t> rep_index;
  std::vector<std::uint32_t> prop_index;
  std::vector<int> labels;
  std::vector<Datapoint> points;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Throws MissingKeyError for an absent vector, ConsistencyError for a
/// datapoint of another role or an unknown proposition id, ShapeError for
/// stores of the wrong dimension.
ProbeData assemble(std::span<const Datapoint> points, std::span<const Proposition> props, const VectorStore& reps,
                   const VectorStore& prop_vectors, TaskVariant task, Role role);

/// Writes the [r; z] columns of `rows` into `out` (input x rows.size()).
/// RandomR draws from `rng`, which must be set for that mode.
void fill_batch(const ProbeData& data, std::span<const std::size_t> rows, ControlMode control, Rng* rng,
                Eigen::MatrixXd& out);

struct TrainConfig {
  TaskVariant task = TaskVariant::TFxPS;
  Role role = Role::Answerer;
  std::size_t hidden = 1024;
  double dropout = 0.1;
  double lr = 1e-3;
  std::size_t batch_size = 512;
  int epochs = 30;
  std::uint64_t seed = 54321;
  double clip_norm = 1.0;
  ControlMode control = ControlMode::None;
  /// Apply the control when scoring validation and test data too.
  bool control_at_eval = false;

  /// Throws ConfigError on out-of-range values and on a task the role
  /// cannot be probed for.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_accuracy = 0.0;
  double max_grad_norm = 0.0;
};

struct TrainResult {
  ProbeModel model;  // best validation epoch
  int best_epoch = 0;
  double best_valid_accuracy = 0.0;
  std::vector<EpochRecord> history;
};

/// Adam on mean cross-entropy with global-norm clipping; no early stopping.
/// Epoch e (1-based) shuffles with seed ^ e. The snapshot with the highest
/// validation accuracy is kept, ties going to the earlier epoch. Throws
/// NumericalError when the loss stops being finite.
TrainResult train(const ProbeData& train_data, const ProbeData& valid_data, const TrainConfig& config);

/// Argmax labels (lowest index on ties). The control, if any, is drawn from
/// `control_seed`.
std::vector<int> predict(const ProbeModel& model, const ProbeData& data, ControlMode control = ControlMode::None,
                         std::uint64_t control_seed = 0);

double accuracy_of(std::span<const int> predicted, std::span<const int> gold);

std::string history_to_json(const TrainResult& result, const TrainConfig& config);

}  // namespace scorekeeping
