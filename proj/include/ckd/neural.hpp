#pragma once

// Fully connected feedforward network with one output unit, trained on mean
// squared error by full-batch gradient descent or Levenberg-Marquardt.
// Parameters flatten layer by layer: weights row-major (out x in), then biases.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ckd/error.hpp"
#include "ckd/numkernel.hpp"
#include "ckd/rng.hpp"

namespace ckd {

enum class Activation { Sigmoid, Identity };

inline std::string activation_name(Activation a) { return a == Activation::Sigmoid ? "sigmoid" : "identity"; }

inline Activation parse_activation(std::string_view s) {
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "identity") return Activation::Identity;
  throw Error(Errc::Config, "unknown activation '" + std::string(s) + "'");
}

inline double activate(Activation a, double z) { return a == Activation::Sigmoid ? 1.0 / (1.0 + std::exp(-z)) : z; }

// derivative expressed through the activation value
inline double activate_slope(Activation a, double out) { return a == Activation::Sigmoid ? out * (1.0 - out) : 1.0; }

struct NnLayer {
  num::Matrix w;  // outputs x inputs
  num::Vector b;
  friend bool operator==(const NnLayer&, const NnLayer&) = default;
};

struct NnModel {
  std::vector<NnLayer> layers;
  Activation activation = Activation::Sigmoid;
  bool converged = true;
  std::size_t epochs = 0;

  std::size_t inputs() const { return layers.empty() ? 0 : layers.front().w.cols(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.rows() * l.w.cols() + l.b.size();
    return n;
  }

  num::Vector parameters() const {
    num::Vector p;
    p.reserve(parameter_count());
    for (const auto& l : layers) {
      p.insert(p.end(), l.w.data().begin(), l.w.data().end());
      p.insert(p.end(), l.b.begin(), l.b.end());
    }
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) throw Error(Errc::DimensionMismatch, "parameter vector has wrong length");
    std::size_t k = 0;
    for (auto& l : layers) {
      for (double& v : l.w.data()) v = p[k++];
      for (double& v : l.b) v = p[k++];
    }
  }
};

/// Layer sizes {inputs, hidden..., 1}; weights and biases uniform(-0.5, 0.5).
inline NnModel init_network(std::span<const std::size_t> sizes, Activation act, std::uint64_t seed) {
  if (sizes.size() < 2 || sizes.back() != 1) throw Error(Errc::BadSpec, "network needs an input size and a single output");
  for (auto s : sizes)
    if (s == 0) throw Error(Errc::BadSpec, "layer sizes must be positive");
  NnModel m;
  m.activation = act;
  Rng rng(seed);
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    NnLayer layer{num::Matrix(sizes[l], sizes[l - 1]), num::Vector(sizes[l])};
    for (double& v : layer.w.data()) v = rng.uniform(-0.5, 0.5);
    for (double& v : layer.b) v = rng.uniform(-0.5, 0.5);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

namespace detail {

// Activations of every layer for one input; acts[0] is the input itself.
inline std::vector<num::Vector> forward_all(const NnModel& m, std::span<const double> x) {
  if (x.size() != m.inputs())
    throw Error(Errc::DimensionMismatch, "network expects " + std::to_string(m.inputs()) + " inputs, got " + std::to_string(x.size()));
  std::vector<num::Vector> acts;
  acts.reserve(m.layers.size() + 1);
  acts.emplace_back(x.begin(), x.end());
  for (const auto& l : m.layers) {
    num::Vector z = num::matvec(l.w, acts.back());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = activate(m.activation, z[j] + l.b[j]);
    acts.push_back(std::move(z));
  }
  return acts;
}

// d(output)/d(parameters) for one sample, added as `scale * derivative` into out.
inline void accumulate_output_derivative(const NnModel& m, const std::vector<num::Vector>& acts, double scale,
                                         std::span<double> out) {
  // offsets of each layer's block in the flattened vector
  std::vector<std::size_t> offset(m.layers.size());
  std::size_t k = 0;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    offset[l] = k;
    k += m.layers[l].w.rows() * m.layers[l].w.cols() + m.layers[l].b.size();
  }
  num::Vector delta{activate_slope(m.activation, acts.back()[0])};
  for (std::size_t l = m.layers.size(); l-- > 0;) {
    const auto& layer = m.layers[l];
    const auto& in = acts[l];
    const std::size_t rows = layer.w.rows(), cols = layer.w.cols();
    for (std::size_t j = 0; j < rows; ++j) {
      const double dj = scale * delta[j];
      double* wrow = out.data() + offset[l] + j * cols;
      for (std::size_t i = 0; i < cols; ++i) wrow[i] += dj * in[i];
      out[offset[l] + rows * cols + j] += dj;
    }
    if (l == 0) break;
    num::Vector prev = num::matvec_transposed(layer.w, delta);
    for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= activate_slope(m.activation, in[i]);
    delta = std::move(prev);
  }
}

inline void check_batch(const NnModel& m, const num::Matrix& x, std::span<const double> t) {
  if (x.rows() != t.size()) throw Error(Errc::DimensionMismatch, "batch rows and targets differ in count");
  if (x.cols() != m.inputs())
    throw Error(Errc::DimensionMismatch, "network expects " + std::to_string(m.inputs()) + " inputs, got " + std::to_string(x.cols()));
}

}  // namespace detail

inline double nn_output(const NnModel& m, std::span<const double> x) { return detail::forward_all(m, x).back()[0]; }

inline int predict_nn(const NnModel& m, std::span<const double> x) { return nn_output(m, x) >= 0.5 ? 1 : 0; }

/// r_n = output(x_n) - t_n.
inline num::Vector nn_residuals(const NnModel& m, const num::Matrix& x, std::span<const double> t) {
  detail::check_batch(m, x, t);
  num::Vector r(x.rows());
  for (std::size_t n = 0; n < x.rows(); ++n) r[n] = nn_output(m, x.row(n)) - t[n];
  return r;
}

/// L = (1/N) sum (o_n - t_n)^2.
inline double nn_loss(const NnModel& m, const num::Matrix& x, std::span<const double> t) {
  if (x.rows() == 0) return 0.0;
  const auto r = nn_residuals(m, x, t);
  return num::dot(r, r) / static_cast<double>(x.rows());
}

/// Gradient of nn_loss with respect to the flattened parameters.
inline num::Vector nn_gradient(const NnModel& m, const num::Matrix& x, std::span<const double> t) {
  detail::check_batch(m, x, t);
  num::Vector g(m.parameter_count(), 0.0);
  const double n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto acts = detail::forward_all(m, x.row(i));
    const double r = acts.back()[0] - t[i];
    detail::accumulate_output_derivative(m, acts, 2.0 * r / n, g);
  }
  return g;
}

/// Jacobian of the residual vector: row n = d(o_n)/d(parameters).
inline num::Matrix nn_jacobian(const NnModel& m, const num::Matrix& x) {
  if (x.cols() != m.inputs()) throw Error(Errc::DimensionMismatch, "network input width mismatch");
  num::Matrix j(x.rows(), m.parameter_count());
  for (std::size_t n = 0; n < x.rows(); ++n) detail::accumulate_output_derivative(m, detail::forward_all(m, x.row(n)), 1.0, j.row(n));
  return j;
}

/// dw = -(J^T J + lambda I)^{-1} J^T r.
inline num::Vector lm_direction(const num::Matrix& jtj, std::span<const double> jtr, double lambda) {
  auto d = num::solve_spd(jtj, jtr, lambda);
  for (double& v : d) v = -v;
  return d;
}

inline num::Vector lm_step(const NnModel& m, const num::Matrix& x, std::span<const double> t, double lambda) {
  const auto j = nn_jacobian(m, x);
  return lm_direction(num::gram(j), num::matvec_transposed(j, nn_residuals(m, x, t)), lambda);
}

struct NnParams {
  std::size_t hidden_units = 10;
  Activation activation = Activation::Sigmoid;
  double learning_rate = 0.05;
  std::size_t max_epochs = 2000;
  double lm_damping = 1e-3;
  double lm_factor = 10.0;
  std::uint64_t seed = 1;
};

inline constexpr double kGdLossTolerance = 1e-9;
inline constexpr double kLmGradientTolerance = 1e-8;
inline constexpr double kLmMaxDamping = 1e10;

struct NnTrace {
  std::vector<double> loss;   // loss before training, then after each epoch (GD) or accepted step (LM)
  std::vector<bool> accepted; // LM only: outcome of every attempted step
};

inline NnModel initial_network(std::size_t inputs, const NnParams& hp) {
  if (hp.hidden_units < 1) throw Error(Errc::BadSpec, "hidden_units must be at least 1");
  const std::size_t sizes[] = {inputs, hp.hidden_units, 1};
  return init_network(sizes, hp.activation, hp.seed);
}

namespace detail {

inline void check_finite_loss(double loss, std::size_t epoch) {
  if (!std::isfinite(loss)) throw Error(Errc::NonFiniteLoss, "loss is not finite at epoch " + std::to_string(epoch));
}

}  // namespace detail

/// Full-batch gradient descent from `start`: w -= eta * grad for max_epochs,
/// stopping early once |loss change| < 1e-9.
inline NnModel nn_train_gd_from(NnModel start, const num::Matrix& x, std::span<const double> t, const NnParams& hp,
                                NnTrace* trace = nullptr) {
  if (!(hp.learning_rate >= 0.0)) throw Error(Errc::BadSpec, "learning rate must be non-negative");
  NnModel m = std::move(start);
  double loss = nn_loss(m, x, t);
  detail::check_finite_loss(loss, 0);
  if (trace) trace->loss.push_back(loss);
  m.converged = false;
  m.epochs = 0;
  auto w = m.parameters();
  for (std::size_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    const auto g = nn_gradient(m, x, t);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= hp.learning_rate * g[k];
    m.set_parameters(w);
    const double next = nn_loss(m, x, t);
    detail::check_finite_loss(next, epoch);
    if (trace) trace->loss.push_back(next);
    m.epochs = epoch;
    const bool flat = std::abs(next - loss) < kGdLossTolerance;
    loss = next;
    if (flat) {
      m.converged = true;
      break;
    }
  }
  return m;
}

/// Levenberg-Marquardt from `start`. A step is kept only if it lowers the
/// loss (lambda /= factor), otherwise lambda *= factor. Stops after
/// max_epochs attempted steps, when |grad| < 1e-8, or when lambda > 1e10.
inline NnModel nn_train_lm_from(NnModel start, const num::Matrix& x, std::span<const double> t, const NnParams& hp,
                                NnTrace* trace = nullptr) {
  if (!(hp.lm_damping > 0.0)) throw Error(Errc::BadSpec, "lm_damping must be positive");
  if (!(hp.lm_factor > 1.0)) throw Error(Errc::BadSpec, "lm_factor must exceed 1");
  NnModel m = std::move(start);
  const double n = static_cast<double>(x.rows());
  auto w = m.parameters();
  auto r = nn_residuals(m, x, t);
  double loss = num::dot(r, r) / n;
  detail::check_finite_loss(loss, 0);
  if (trace) trace->loss.push_back(loss);
  m.converged = false;
  m.epochs = 0;
  double lambda = hp.lm_damping;
  bool fresh = true;
  num::Matrix jtj;
  num::Vector jtr;
  for (std::size_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    if (fresh) {
      const auto j = nn_jacobian(m, x);
      jtj = num::gram(j);
      jtr = num::matvec_transposed(j, r);
      fresh = false;
      if (2.0 / n * num::norm2(jtr) < kLmGradientTolerance) {
        m.converged = true;
        break;
      }
    }
    m.epochs = epoch;
    bool accept = false;
    num::Vector trial_w;
    num::Vector trial_r;
    double trial_loss = 0.0;
    try {
      const auto d = lm_direction(jtj, jtr, lambda);
      trial_w = w;
      for (std::size_t k = 0; k < w.size(); ++k) trial_w[k] += d[k];
      m.set_parameters(trial_w);
      trial_r = nn_residuals(m, x, t);
      trial_loss = num::dot(trial_r, trial_r) / n;
      accept = std::isfinite(trial_loss) && trial_loss < loss;
    } catch (const Error& e) {
      if (e.code() != Errc::NotPositiveDefinite) throw;
    }
    if (trace) trace->accepted.push_back(accept);
    if (accept) {
      w = std::move(trial_w);
      r = std::move(trial_r);
      loss = trial_loss;
      if (trace) trace->loss.push_back(loss);
      lambda /= hp.lm_factor;
      fresh = true;
    } else {
      m.set_parameters(w);
      lambda *= hp.lm_factor;
      if (lambda > kLmMaxDamping) {
        m.converged = true;
        break;
      }
    }
  }
  m.set_parameters(w);
  return m;
}

/// Targets are the 0/1 labels.
inline num::Vector nn_targets(std::span<const int> y) {
  num::Vector t(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] == 1 ? 1.0 : 0.0;
  return t;
}

inline NnModel nn_train_gd(const num::Matrix& x, std::span<const int> y, const NnParams& hp, NnTrace* trace = nullptr) {
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "nn_train_gd: row/label count mismatch");
  return nn_train_gd_from(initial_network(x.cols(), hp), x, nn_targets(y), hp, trace);
}

inline NnModel nn_train_lm(const num::Matrix& x, std::span<const int> y, const NnParams& hp, NnTrace* trace = nullptr) {
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "nn_train_lm: row/label count mismatch");
  return nn_train_lm_from(initial_network(x.cols(), hp), x, nn_targets(y), hp, trace);
}

}  // namespace ckd
