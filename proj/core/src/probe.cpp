#include "scorekeeping/probe.hpp"

#include <cmath>
#include <fstream>

#include "scorekeeping/binary_io.hpp"
#include "scorekeeping/errors.hpp"

namespace scorekeeping {

namespace {

using Eigen::Index;

void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
  // Row-major fill keeps the draw order independent of Eigen's storage.
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = uniform_real(rng, -bound, bound);
  }
}

void fill_uniform(Eigen::VectorXd& v, double bound, Rng& rng) {
  for (Index i = 0; i < v.size(); ++i) v(i) = uniform_real(rng, -bound, bound);
}

void check_labels(std::span<const int> labels, Index n_labels, Index batch) {
  if (static_cast<Index>(labels.size()) != batch) throw ShapeError("label count does not match batch size");
  for (int y : labels) {
    if (y < 0 || y >= n_labels) throw RangeError("label " + std::to_string(y) + " out of range");
  }
}

template <typename M>
void write_matrix(std::ostream& out, const M& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) binary::write_f64(out, m(i, j));
  }
}

void read_matrix(std::istream& in, Eigen::MatrixXd& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = binary::read_f64(in, "weights");
  }
}

}  // namespace

std::size_t ProbeShape::num_parameters() const noexcept {
  return hidden * input_dim() + hidden + n_labels * hidden + n_labels;
}

ProbeParams ProbeParams::zeros(const ProbeShape& shape) {
  const auto h = static_cast<Index>(shape.hidden);
  const auto k = static_cast<Index>(shape.n_labels);
  ProbeParams p;
  p.w1 = Eigen::MatrixXd::Zero(h, static_cast<Index>(shape.input_dim()));
  p.b1 = Eigen::VectorXd::Zero(h);
  p.w2 = Eigen::MatrixXd::Zero(k, h);
  p.b2 = Eigen::VectorXd::Zero(k);
  return p;
}

double ProbeParams::squared_norm() const {
  return w1.squaredNorm() + b1.squaredNorm() + w2.squaredNorm() + b2.squaredNorm();
}

ProbeModel::ProbeModel(const ProbeShape& shape, Rng& rng) : shape_(shape), params_(ProbeParams::zeros(shape)) {
  if (shape.hidden == 0 || shape.n_labels < 2 || shape.input_dim() == 0) throw ShapeError("degenerate probe shape");
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(shape.input_dim()));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  fill_uniform(params_.w1, bound1, rng);
  fill_uniform(params_.b1, bound1, rng);
  fill_uniform(params_.w2, bound2, rng);
  fill_uniform(params_.b2, bound2, rng);
}

ProbeModel::ProbeModel(const ProbeShape& shape, ProbeParams params) : shape_(shape), params_(std::move(params)) {
  const auto h = static_cast<Index>(shape.hidden);
  const auto k = static_cast<Index>(shape.n_labels);
  if (params_.w1.rows() != h || params_.w1.cols() != static_cast<Index>(shape.input_dim()) ||
      params_.b1.size() != h || params_.w2.rows() != k || params_.w2.cols() != h || params_.b2.size() != k) {
    throw ShapeError("parameter tensors do not match the probe shape");
  }
}

Eigen::MatrixXd forward_logits(const ProbeModel& model, const Eigen::MatrixXd& input, double dropout, Rng* rng,
                               ForwardCache* cache) {
  const auto& p = model.params();
  if (input.rows() != p.w1.cols()) {
    throw ShapeError("input has " + std::to_string(input.rows()) + " rows, probe expects " +
                     std::to_string(p.w1.cols()));
  }
  Eigen::MatrixXd pre = p.w1 * input;
  pre.colwise() += p.b1;
  Eigen::MatrixXd hidden = (1.0 + (-pre.array()).exp()).inverse().matrix();
  Eigen::MatrixXd keep;
  if (dropout > 0.0 && rng != nullptr) {
    const double scale = 1.0 / (1.0 - dropout);
    keep.resize(hidden.rows(), hidden.cols());
    for (Index j = 0; j < keep.cols(); ++j) {
      for (Index i = 0; i < keep.rows(); ++i) keep(i, j) = unit_double(*rng) < dropout ? 0.0 : scale;
    }
  }
  Eigen::MatrixXd activation;
  if (keep.size() != 0) {
    activation = hidden;
    hidden.array() *= keep.array();
  }
  Eigen::MatrixXd logits = p.w2 * hidden;
  logits.colwise() += p.b2;
  if (cache != nullptr) {
    cache->input = input;
    cache->hidden = std::move(hidden);
    cache->keep = std::move(keep);
    cache->activation = std::move(activation);
    cache->logits = logits;
  }
  return logits;
}

Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits.rowwise() - logits.colwise().maxCoeff();
  out = out.array().exp().matrix();
  out.array().rowwise() /= out.colwise().sum().array();
  return out;
}

double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels) {
  check_labels(labels, logits.rows(), logits.cols());
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (Index j = 0; j < logits.cols(); ++j) {
    const auto col = logits.col(j);
    const double mx = col.maxCoeff();
    const double lse = mx + std::log((col.array() - mx).exp().sum());
    total += lse - col(labels[static_cast<std::size_t>(j)]);
  }
  return total / static_cast<double>(labels.size());
}

double loss_and_gradients(const ProbeModel& model, const Eigen::MatrixXd& input, std::span<const int> labels,
                          double dropout, Rng* rng, ProbeParams& grads) {
  ForwardCache cache;
  const Eigen::MatrixXd logits = forward_logits(model, input, dropout, rng, &cache);
  const double loss = cross_entropy(logits, labels);
  const auto batch = static_cast<double>(labels.size());
  const auto& p = model.params();

  // dL/dlogits = (softmax - onehot) / B
  Eigen::MatrixXd delta2 = softmax(logits);
  for (Index j = 0; j < delta2.cols(); ++j) delta2(labels[static_cast<std::size_t>(j)], j) -= 1.0;
  delta2 /= batch;

  grads.w2.noalias() = delta2 * cache.hidden.transpose();
  grads.b2 = delta2.rowwise().sum();

  Eigen::MatrixXd delta1 = p.w2.transpose() * delta2;
  if (cache.keep.size() != 0) {
    const auto& s = cache.activation.array();
    delta1.array() *= cache.keep.array() * s * (1.0 - s);
  } else {
    const auto& s = cache.hidden.array();
    delta1.array() *= s * (1.0 - s);
  }
  grads.w1.noalias() = delta1 * cache.input.transpose();
  grads.b1 = delta1.rowwise().sum();
  return loss;
}

double clip_gradients(ProbeParams& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    grads.w1 *= scale;
    grads.b1 *= scale;
    grads.w2 *= scale;
    grads.b2 *= scale;
  }
  return norm;
}

AdamState::AdamState(const ProbeShape& shape, double learning_rate)
    : lr(learning_rate), m(ProbeParams::zeros(shape)), v(ProbeParams::zeros(shape)) {}

void adam_step(ProbeModel& model, const ProbeParams& grads, AdamState& state) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double step_size = state.lr / bc1;
  const double sqrt_bc2 = std::sqrt(bc2);

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v.array() = state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square();
    param.array() -= step_size * m.array() / (v.array().sqrt() / sqrt_bc2 + state.eps);
  };
  auto& p = model.params();
  update(p.w1, grads.w1, state.m.w1, state.v.w1);
  update(p.b1, grads.b1, state.m.b1, state.v.b1);
  update(p.w2, grads.w2, state.m.w2, state.v.w2);
  update(p.b2, grads.b2, state.m.b2, state.v.b2);
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  const auto& shape = ckpt.model.shape();
  out.write("SKPM", 4);
  binary::write_le<std::uint16_t>(out, kCheckpointVersion);
  binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(shape.n_labels));
  binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ckpt.task));
  binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ckpt.role));
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.rep_dim));
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.prop_dim));
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.hidden));
  const auto& p = ckpt.model.params();
  write_matrix(out, p.w1);
  write_matrix(out, p.b1);
  write_matrix(out, p.w2);
  write_matrix(out, p.b2);
  if (!out) throw FormatError("write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  binary::expect_magic(in, "SKPM");
  const auto version = binary::read_le<std::uint16_t>(in, "version");
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  ProbeShape shape;
  shape.n_labels = binary::read_le<std::uint8_t>(in, "labels");
  const auto task = binary::read_le<std::uint8_t>(in, "task");
  const auto role = binary::read_le<std::uint8_t>(in, "role");
  if (task > 3 || role > 1) throw FormatError("bad task or role byte in checkpoint");
  shape.rep_dim = binary::read_le<std::uint32_t>(in, "rep dim");
  shape.prop_dim = binary::read_le<std::uint32_t>(in, "prop dim");
  shape.hidden = binary::read_le<std::uint32_t>(in, "hidden");
  Checkpoint ckpt;
  ckpt.task = static_cast<TaskVariant>(task);
  ckpt.role = static_cast<Role>(role);
  if (shape.n_labels != static_cast<std::size_t>(num_labels(ckpt.task))) {
    throw FormatError("checkpoint label count does not match its task");
  }
  if (shape.hidden == 0 || shape.input_dim() == 0 || shape.hidden > (1u << 16) || shape.input_dim() > (1u << 20)) {
    throw FormatError("implausible checkpoint dimensions");
  }
  auto params = ProbeParams::zeros(shape);
  read_matrix(in, params.w1);
  Eigen::MatrixXd b1(params.b1.size(), 1);
  read_matrix(in, b1);
  params.b1 = b1.col(0);
  read_matrix(in, params.w2);
  Eigen::MatrixXd b2(params.b2.size(), 1);
  read_matrix(in, b2);
  params.b2 = b2.col(0);
  if (!binary::at_eof(in)) throw FormatError("trailing bytes in checkpoint");
  ckpt.model = ProbeModel(shape, std::move(params));
  return ckpt;
}

}  // namespace scorekeeping
