#pragma once

// Two-layer probe: v = softmax(W2 sigmoid(W1 [r; z] + b1) + b2).
// Batches are column-major: one datapoint per column.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scorekeeping/embed.hpp"
#include "scorekeeping/model.hpp"
#include "scorekeeping/rng.hpp"

namespace scorekeeping {

struct ProbeShape {
  std::size_t rep_dim = kRepDim;
  std::size_t prop_dim = kPropDim;
  std::size_t hidden = 1024;
  std::size_t n_labels = 4;

  std::size_t input_dim() const noexcept { return rep_dim + prop_dim; }
  /// Weights plus biases of both layers.
  std::size_t num_parameters() const noexcept;

  friend bool operator==(const ProbeShape&, const ProbeShape&) = default;
};

struct ProbeParams {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // labels x hidden
  Eigen::VectorXd b2;

  static ProbeParams zeros(const ProbeShape& shape);
  /// Sum of squared entries over all four tensors.
  double squared_norm() const;
};

class ProbeModel {
 public:
  ProbeModel() = default;
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  ProbeModel(const ProbeShape& shape, Rng& rng);
  ProbeModel(const ProbeShape& shape, ProbeParams params);

  const ProbeShape& shape() const noexcept { return shape_; }
  ProbeParams& params() noexcept { return params_; }
  const ProbeParams& params() const noexcept { return params_; }

 private:
  ProbeShape shape_;
  ProbeParams params_;
};

struct ForwardCache {
  Eigen::MatrixXd input;       // input x B
  Eigen::MatrixXd hidden;      // sigmoid activations after dropout
  Eigen::MatrixXd keep;        // dropout scale per unit (0 or 1/(1-p)); empty without dropout
  Eigen::MatrixXd activation;  // sigmoid before dropout; empty without dropout
  Eigen::MatrixXd logits;      // labels x B
};

/// Logits for a batch. Dropout is applied when `dropout > 0` and `rng` is set.
Eigen::MatrixXd forward_logits(const ProbeModel& model, const Eigen::MatrixXd& input, double dropout = 0.0,
                               Rng* rng = nullptr, ForwardCache* cache = nullptr);

/// Column-wise softmax computed with a max shift.
Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits);

/// Mean cross-entropy of integer labels under softmax(logits), via log-sum-exp.
double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels);

/// Mean cross-entropy and its gradients for one batch.
double loss_and_gradients(const ProbeModel& model, const Eigen::MatrixXd& input, std::span<const int> labels,
                          double dropout, Rng* rng, ProbeParams& grads);

/// Rescales gradients whose global L2 norm exceeds max_norm; returns the norm
/// before clipping.
double clip_gradients(ProbeParams& grads, double max_norm);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  ProbeParams m;
  ProbeParams v;

  AdamState(const ProbeShape& shape, double learning_rate);
};

void adam_step(ProbeModel& model, const ProbeParams& grads, AdamState& state);

// SKPM: "SKPM", u16 version=1, u8 labels, u8 task, u8 role, u32 rep_dim,
// u32 prop_dim, u32 hidden, then W1 (row-major), b1, W2 (row-major), b2 as f64.
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  ProbeModel model;
  TaskVariant task = TaskVariant::TFxPS;
  Role role = Role::Answerer;
};

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace scorekeeping
