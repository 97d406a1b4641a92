#pragma once

// Gaussian discriminant analysis. Linear: one pooled covariance; quadratic:
// one covariance per class. Covariances are ridge-regularized until their
// Cholesky factor exists, since one-hot columns make them singular.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ckd/error.hpp"
#include "ckd/numkernel.hpp"

namespace ckd {

enum class DiscriminantKind { Linear, Quadratic };

inline std::string discriminant_kind_name(DiscriminantKind k) {
  return k == DiscriminantKind::Linear ? "linear" : "quadratic";
}

struct DiscriminantModel {
  DiscriminantKind kind = DiscriminantKind::Linear;
  bool pooled = true;                 // both classes share cov[0] == cov[1]
  std::array<num::Vector, 2> mean;    // indexed by label: [0] negative, [1] positive
  std::array<num::Matrix, 2> cov;     // regularized (ridge already added)
  std::array<double, 2> log_prior{};
  std::array<double, 2> ridge{};
  // derived at fit time
  std::array<num::Matrix, 2> chol;
  std::array<double, 2> log_det{};
  num::Vector w;  // linear form, pooled models only: w.x + b > 0 favours positive
  double b = 0.0;

  std::size_t features() const { return mean[0].size(); }
};

inline constexpr int kMaxRidgeEscalations = 40;

struct RegularizedCovariance {
  num::Matrix cov;
  num::Matrix chol;
  double ridge = 0.0;
};

/// Adds ridge = 1e-6 * trace / d to the diagonal, multiplying it by 10 until
/// the Cholesky factorization succeeds.
inline RegularizedCovariance regularize_covariance(const num::Matrix& cov) {
  const std::size_t d = cov.rows();
  const double tr = num::trace(cov);
  double ridge = tr > 0.0 && std::isfinite(tr) ? 1e-6 * tr / static_cast<double>(d) : 1e-6;
  for (int attempt = 0; attempt < kMaxRidgeEscalations; ++attempt, ridge *= 10.0) {
    try {
      num::Matrix reg = cov;
      for (std::size_t i = 0; i < d; ++i) reg(i, i) += ridge;
      auto l = num::cholesky(reg);
      return {std::move(reg), std::move(l), ridge};
    } catch (const Error& e) {
      if (e.code() != Errc::NotPositiveDefinite) throw;
    }
  }
  throw Error(Errc::NotPositiveDefinite, "covariance stays indefinite after ridge escalation");
}

namespace detail {

// Sum of (x - mean)(x - mean)^T over the given rows.
inline num::Matrix scatter(const num::Matrix& x, const std::vector<std::size_t>& rows, const num::Vector& mean) {
  const std::size_t d = x.cols();
  num::Matrix s(d, d);
  num::Vector c(d);
  for (auto r : rows) {
    auto xr = x.row(r);
    for (std::size_t j = 0; j < d; ++j) c[j] = xr[j] - mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b <= a; ++b) s(a, b) += c[a] * c[b];
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < a; ++b) s(b, a) = s(a, b);
  return s;
}

}  // namespace detail

/// Fills log_det and, for pooled models, the linear form (w, b) from the
/// Cholesky factors.
inline void finish_discriminant(DiscriminantModel& m) {
  for (int c = 0; c < 2; ++c) m.log_det[c] = num::log_det_from_cholesky(m.chol[c]);
  if (!m.pooled) return;
  const std::size_t d = m.features();
  num::Vector diff(d);
  for (std::size_t j = 0; j < d; ++j) diff[j] = m.mean[1][j] - m.mean[0][j];
  m.w = num::cholesky_solve(m.chol[0], diff);
  const auto s1 = num::cholesky_solve(m.chol[0], m.mean[1]);
  const auto s0 = num::cholesky_solve(m.chol[0], m.mean[0]);
  m.b = -0.5 * (num::dot(m.mean[1], s1) - num::dot(m.mean[0], s0)) + m.log_prior[1] - m.log_prior[0];
}

/// Fits class means, priors and covariances. `share_covariance` makes the
/// quadratic kind use the pooled covariance (it then reproduces the linear
/// kind's decisions).
inline DiscriminantModel fit_discriminant(const num::Matrix& x, std::span<const int> y, DiscriminantKind kind,
                                          bool share_covariance = false) {
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "fit_discriminant: row/label count mismatch");
  const std::size_t d = x.cols();
  std::array<std::vector<std::size_t>, 2> rows;
  for (std::size_t i = 0; i < y.size(); ++i) rows[y[i] == 1].push_back(i);
  if (rows[0].empty() || rows[1].empty())
    throw Error(Errc::DegenerateData, "discriminant analysis needs both classes in the training data");
  if (d == 0) throw Error(Errc::DegenerateData, "discriminant analysis needs at least one feature");

  DiscriminantModel m;
  m.kind = kind;
  m.pooled = kind == DiscriminantKind::Linear || share_covariance;
  const double n = static_cast<double>(x.rows());
  std::array<num::Matrix, 2> scatter;
  for (int c = 0; c < 2; ++c) {
    num::Vector mu(d, 0.0);
    for (auto r : rows[c]) {
      auto xr = x.row(r);
      for (std::size_t j = 0; j < d; ++j) mu[j] += xr[j];
    }
    for (double& v : mu) v /= static_cast<double>(rows[c].size());
    m.mean[c] = std::move(mu);
    m.log_prior[c] = std::log(static_cast<double>(rows[c].size()) / n);
    scatter[c] = detail::scatter(x, rows[c], m.mean[c]);
  }

  if (m.pooled) {
    if (x.rows() < 3) throw Error(Errc::TooFewSamples, "pooled covariance needs at least 3 samples");
    num::Matrix pooled(d, d);
    const double dof = n - 2.0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) pooled(a, b) = (scatter[0](a, b) + scatter[1](a, b)) / dof;
    auto reg = regularize_covariance(pooled);
    for (int c = 0; c < 2; ++c) {
      m.cov[c] = reg.cov;
      m.chol[c] = reg.chol;
      m.ridge[c] = reg.ridge;
    }
  } else {
    for (int c = 0; c < 2; ++c) {
      if (rows[c].size() < 2)
        throw Error(Errc::TooFewSamples, "quadratic discriminant needs at least 2 samples per class");
      num::Matrix cov = scatter[c];
      const double dof = static_cast<double>(rows[c].size() - 1);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) cov(a, b) /= dof;
      auto reg = regularize_covariance(cov);
      m.cov[c] = std::move(reg.cov);
      m.chol[c] = std::move(reg.chol);
      m.ridge[c] = reg.ridge;
    }
  }
  finish_discriminant(m);
  return m;
}

/// Per-class Gaussian log-density plus log prior (the shared -d/2 log 2pi is
/// included so the values are true log joint densities). Index 1 = positive.
inline std::array<double, 2> discriminant_score(const DiscriminantModel& m, std::span<const double> x) {
  const std::size_t d = m.features();
  if (x.size() != d) throw Error(Errc::DimensionMismatch, "discriminant expects " + std::to_string(d) + " features");
  std::array<double, 2> out{};
  num::Vector c(d);
  for (int k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < d; ++j) c[j] = x[j] - m.mean[k][j];
    const auto z = num::forward_substitute(m.chol[k], c);
    const double maha = num::dot(z, z);
    out[k] = -0.5 * m.log_det[k] - 0.5 * maha + m.log_prior[k] -
             0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
  }
  return out;
}

/// Linear kind decides by the sign of w.x + b; quadratic by the larger score.
/// Exact ties go to the positive class.
inline int predict_discriminant(const DiscriminantModel& m, std::span<const double> x) {
  if (m.kind == DiscriminantKind::Linear) {
    if (x.size() != m.features())
      throw Error(Errc::DimensionMismatch, "discriminant expects " + std::to_string(m.features()) + " features");
    return num::dot(m.w, x) + m.b >= 0.0 ? 1 : 0;
  }
  const auto s = discriminant_score(m, x);
  return s[1] >= s[0] ? 1 : 0;
}

}  // namespace ckd
