#pragma once

// Soft-margin SVM trained by SMO with second-order working-set selection
// (Fan, Chen & Lin 2005). Labels are +1 / -1 inside this file.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckd/error.hpp"
#include "ckd/numkernel.hpp"

namespace ckd {

enum class SvmKernel { Linear, Poly2 };

inline std::string kernel_name(SvmKernel k) { return k == SvmKernel::Linear ? "linear" : "poly2"; }

inline SvmKernel parse_kernel(std::string_view s) {
  if (s == "linear") return SvmKernel::Linear;
  if (s == "poly2") return SvmKernel::Poly2;
  throw Error(Errc::Config, "unknown svm kernel '" + std::string(s) + "'");
}

/// linear: x.z; poly2: (1 + x.z)^2.
inline double kernel_value(SvmKernel k, std::span<const double> a, std::span<const double> b) {
  const double d = num::dot(a, b);
  return k == SvmKernel::Linear ? d : (1.0 + d) * (1.0 + d);
}

struct SvmParams {
  double c = 1.0;
  SvmKernel kernel = SvmKernel::Linear;
  double tol = 1e-3;
  std::optional<std::size_t> max_passes;  // iteration budget; empty = 200 * n
};

struct SvmModel {
  SvmKernel kernel = SvmKernel::Linear;
  double c = 1.0;
  num::Matrix support_vectors;
  std::vector<double> alpha;  // 0 < alpha_i <= C, aligned with support_vectors
  std::vector<double> coef;   // alpha_i * y_i
  double b = 0.0;
  bool converged = true;
  std::size_t iterations = 0;

  std::size_t features() const { return support_vectors.cols(); }
};

struct SmoResult {
  SvmModel model;
  std::vector<double> alpha;  // one per training row, zeros included
  double dual_objective = 0.0;
};

/// f(x) = sum_i coef_i K(sv_i, x) + b.
inline double svm_decision(const SvmModel& m, std::span<const double> x) {
  if (m.support_vectors.rows() > 0 && x.size() != m.features())
    throw Error(Errc::DimensionMismatch, "svm expects " + std::to_string(m.features()) + " features");
  double f = m.b;
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) f += m.coef[i] * kernel_value(m.kernel, m.support_vectors.row(i), x);
  return f;
}

inline int predict_svm(const SvmModel& m, std::span<const double> x) { return svm_decision(m, x) >= 0.0 ? 1 : 0; }

/// W(alpha) = sum alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(const num::Matrix& x, std::span<const int> y, std::span<const double> alpha, SvmKernel k) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (alpha[i] == 0.0) continue;
    lin += alpha[i];
    for (std::size_t j = 0; j < x.rows(); ++j)
      if (alpha[j] != 0.0) quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel_value(k, x.row(i), x.row(j));
  }
  return lin - 0.5 * quad;
}

/// Solves min 1/2 a^T Q a - e^T a, 0 <= a <= C, y^T a = 0, stopping once the
/// maximal KKT violation m(a) - M(a) drops below tol. y must be +1 / -1.
inline SmoResult smo_train(const num::Matrix& x, std::span<const int> y, const SvmParams& p) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw Error(Errc::DimensionMismatch, "smo_train: row/label count mismatch");
  if (!(p.c > 0.0)) throw Error(Errc::BadSpec, "svm C must be positive");
  if (!(p.tol > 0.0 && p.tol < 1.0)) throw Error(Errc::BadSpec, "svm tol must lie in (0, 1)");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v != 1 && v != -1) throw Error(Errc::BadSpec, "smo_train labels must be +1 or -1");
    (v == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw Error(Errc::DegenerateData, "svm needs both classes in the training data");

  constexpr double kTau = 1e-12;
  const double c = p.c;
  const std::size_t budget = p.max_passes.value_or(200 * n);

  // Q_ij = y_i y_j K_ij, cached in full; training sets here are a few hundred rows.
  num::Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = y[i] * y[j] * kernel_value(p.kernel, x.row(i), x.row(j));
      q(i, j) = v;
      q(j, i) = v;
    }

  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  bool converged = false;
  std::size_t iter = 0;
  for (; iter < budget; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) gmax = -grad[t], i_sel = static_cast<std::ptrdiff_t>(t);
      } else {
        if (!lower(t) && grad[t] >= gmax) gmax = grad[t], i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j_sel = -1;
    double obj_min = std::numeric_limits<double>::infinity();
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff;
        double quad;
        if (y[t] == 1) {
          if (lower(t)) continue;
          gmax2 = std::max(gmax2, grad[t]);
          grad_diff = gmax + grad[t];
          quad = q(i, i) + q(t, t) - 2.0 * y[i] * q(i, t);
        } else {
          if (upper(t)) continue;
          gmax2 = std::max(gmax2, -grad[t]);
          grad_diff = gmax - grad[t];
          quad = q(i, i) + q(t, t) + 2.0 * y[i] * q(i, t);
        }
        if (grad_diff > 0.0) {
          const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
          if (obj <= obj_min) obj_min = obj, j_sel = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (i_sel < 0 || j_sel < 0 || gmax + gmax2 < p.tol) {
      converged = true;
      break;
    }

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double ai_old = alpha[i], aj_old = alpha[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = diff;
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0, alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) alpha[i] = c, alpha[j] = c - diff;
      } else if (alpha[j] > c) {
        alpha[j] = c, alpha[i] = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) alpha[i] = c, alpha[j] = sum - c;
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0, alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) alpha[j] = c, alpha[i] = sum - c;
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0, alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai_old, dj = alpha[j] - aj_old;
    auto qi = q.row(i);
    auto qj = q.row(j);
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
  }

  // bias: average of y_i G_i over free vectors, else the midpoint of the
  // feasible interval given by the bounded ones
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  SmoResult out;
  out.alpha = alpha;
  SvmModel& m = out.model;
  m.kernel = p.kernel;
  m.c = c;
  m.b = -rho;
  m.converged = converged;
  m.iterations = iter;
  m.support_vectors = num::Matrix(0, x.cols());
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    m.support_vectors.push_row(x.row(t));
    m.alpha.push_back(alpha[t]);
    m.coef.push_back(alpha[t] * y[t]);
  }
  // from the maintained gradient: W = -(1/2) sum alpha_i (G_i - 1)
  double w = 0.0;
  for (std::size_t t = 0; t < n; ++t) w -= 0.5 * alpha[t] * (grad[t] - 1.0);
  out.dual_objective = w;
  return out;
}

}  // namespace ckd
