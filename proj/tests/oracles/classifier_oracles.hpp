#pragma once

// Brute-force references for the classifier tests. Each one recomputes its
// answer from first principles without calling the code under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

// ---- split search ----

inline double node_impurity(std::size_t neg, std::size_t pos, bool entropy) {
  const double n = static_cast<double>(neg + pos);
  if (n == 0) return 0.0;
  const double p[2] = {static_cast<double>(neg) / n, static_cast<double>(pos) / n};
  if (!entropy) return 1.0 - p[0] * p[0] - p[1] * p[1];
  double h = 0.0;
  for (double q : p)
    if (q > 0) h -= q * std::log(q) / std::log(2.0);
  return h;
}

struct Split {
  std::optional<double> threshold;
  double score = 0.0;
};

/// Tries every midpoint between distinct values, recounting both sides from
/// scratch each time. Keeps the lowest threshold among the best scores.
inline Split best_split(const std::vector<double>& v, const std::vector<int>& y, bool entropy, std::size_t min_leaf = 1) {
  std::vector<double> distinct = v;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::pair<double, double>> cand;  // (threshold, score)
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    const double t = distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0;
    std::size_t ln = 0, lp = 0, rn = 0, rp = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] <= t) (y[k] == 1 ? lp : ln)++;
      else (y[k] == 1 ? rp : rn)++;
    }
    if (ln + lp < min_leaf || rn + rp < min_leaf) continue;
    const double n = static_cast<double>(v.size());
    const double score = node_impurity(ln + rn, lp + rp, entropy) -
                         static_cast<double>(ln + lp) / n * node_impurity(ln, lp, entropy) -
                         static_cast<double>(rn + rp) / n * node_impurity(rn, rp, entropy);
    cand.emplace_back(t, score);
  }
  Split out;
  if (cand.empty()) return out;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cand) best = std::max(best, c.second);
  for (const auto& c : cand)
    if (c.second >= best - 1e-12) {
      out.threshold = c.first;
      out.score = c.second;
      break;
    }
  return out;
}

// ---- k nearest neighbours ----

enum class Metric { Euclidean, Cosine, Minkowski3 };

inline double naive_distance(Metric m, const std::vector<double>& a, const std::vector<double>& b) {
  if (m == Metric::Cosine) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i], aa += a[i] * a[i], bb += b[i] * b[i];
    if (aa == 0 || bb == 0) return 1.0;
    return 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
  }
  const double p = m == Metric::Euclidean ? 2.0 : 3.0;
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
  return m == Metric::Euclidean ? std::sqrt(s) : std::cbrt(s);
}

/// Full scan, full sort by (distance, index), then the documented vote.
inline int knn_predict(const std::vector<std::vector<double>>& train, const std::vector<int>& labels,
                       const std::vector<double>& q, std::size_t k, Metric m, bool squared_inverse) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < train.size(); ++i) all.emplace_back(naive_distance(m, train[i], q), i);
  std::sort(all.begin(), all.end());
  double w[2] = {0, 0};
  for (std::size_t j = 0; j < k; ++j) {
    const double d = all[j].first;
    w[labels[all[j].second] == 1] += squared_inverse ? 1.0 / std::max(d * d, 1e-12) : 1.0;
  }
  if (w[1] != w[0]) return w[1] > w[0] ? 1 : 0;
  bool pos = false, neg = false;
  for (std::size_t j = 0; j < k && all[j].first == all[0].first; ++j) (labels[all[j].second] == 1 ? pos : neg) = true;
  return pos ? 1 : 0;
}

// ---- SVM dual by projected gradient ----

/// Euclidean projection onto {0 <= a <= C, y.a = 0}, by bisection on the
/// multiplier of the equality constraint.
inline std::vector<double> project(const std::vector<double>& v, const std::vector<int>& y, double c) {
  auto at = [&](double mu) {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::clamp(v[i] - mu * y[i], 0.0, c);
    return a;
  };
  auto balance = [&](double mu) {
    const auto a = at(mu);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * y[i];
    return s;
  };
  double lo = -1e6, hi = 1e6;  // balance is non-increasing in mu
  for (int it = 0; it < 64; ++it) {
    const double mid = (lo + hi) / 2;
    (balance(mid) > 0 ? lo : hi) = mid;
  }
  return at((lo + hi) / 2);
}

/// Maximizes sum a - 1/2 a^T Q a by projected gradient ascent; returns the
/// objective value.
inline double svm_dual_max(const std::vector<std::vector<double>>& k, const std::vector<int>& y, double c,
                           int iterations = 100000) {
  const std::size_t n = y.size();
  double lmax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(k[i][j]);
    lmax = std::max(lmax, row);
  }
  const double step = 1.0 / std::max(lmax, 1e-9);
  std::vector<double> a(n, 0.0);
  auto objective = [&](const std::vector<double>& al) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s += al[i];
      for (std::size_t j = 0; j < n; ++j) s -= 0.5 * al[i] * al[j] * y[i] * y[j] * k[i][j];
    }
    return s;
  };
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i] -= y[i] * y[j] * k[i][j] * a[j];
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a[i] + step * g[i];
    a = project(v, y, c);
  }
  return objective(a);
}

// ---- Gaussian discriminant ----

/// log N(x; mu, S) + log prior for a 2x2 covariance, written out by hand.
inline double gaussian_log_joint_2d(const std::vector<double>& x, const std::vector<double>& mu,
                                    const std::vector<std::vector<double>>& s, double prior) {
  const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
  const double i00 = s[1][1] / det, i01 = -s[0][1] / det, i11 = s[0][0] / det;
  const double d0 = x[0] - mu[0], d1 = x[1] - mu[1];
  const double q = d0 * d0 * i00 + 2 * d0 * d1 * i01 + d1 * d1 * i11;
  const double pi = 3.14159265358979323846;
  return -std::log(2 * pi) - 0.5 * std::log(det) - 0.5 * q + std::log(prior);
}

// ---- derivatives ----

/// Central differences of f at w with step h.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> w, double h) {
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double keep = w[i];
    w[i] = keep + h;
    const double up = f(w);
    w[i] = keep - h;
    const double down = f(w);
    w[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace oracle
