#pragma once

// k-nearest-neighbour voting over a stored training matrix.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ckd/error.hpp"
#include "ckd/numkernel.hpp"

namespace ckd {

enum class KnnMetric { Euclidean, Cosine, Minkowski3 };
enum class KnnWeighting { Uniform, SquaredInverse };

inline std::string metric_name(KnnMetric m) {
  switch (m) {
    case KnnMetric::Euclidean: return "euclidean";
    case KnnMetric::Cosine: return "cosine";
    case KnnMetric::Minkowski3: return "minkowski3";
  }
  return "?";
}

inline KnnMetric parse_metric(std::string_view s) {
  if (s == "euclidean") return KnnMetric::Euclidean;
  if (s == "cosine") return KnnMetric::Cosine;
  if (s == "minkowski3") return KnnMetric::Minkowski3;
  throw Error(Errc::Config, "unknown knn metric '" + std::string(s) + "'");
}

inline std::string weighting_name(KnnWeighting w) { return w == KnnWeighting::Uniform ? "uniform" : "squared_inverse"; }

inline KnnWeighting parse_weighting(std::string_view s) {
  if (s == "uniform") return KnnWeighting::Uniform;
  if (s == "squared_inverse") return KnnWeighting::SquaredInverse;
  throw Error(Errc::Config, "unknown knn weighting '" + std::string(s) + "'");
}

inline double distance(KnnMetric m, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "distance: vectors differ in length");
  switch (m) {
    case KnnMetric::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    case KnnMetric::Minkowski3: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        s += d * d * d;
      }
      return std::cbrt(s);
    }
    case KnnMetric::Cosine: {
      const double na = num::norm2(a), nb = num::norm2(b);
      if (na == 0.0 || nb == 0.0) return 1.0;
      return 1.0 - num::dot(a, b) / (na * nb);
    }
  }
  return 0.0;
}

struct KnnParams {
  std::size_t k = 1;
  KnnMetric metric = KnnMetric::Euclidean;
  KnnWeighting weighting = KnnWeighting::Uniform;
};

struct KnnModel {
  num::Matrix x;
  std::vector<int> y;
  KnnParams params;
};

struct Neighbor {
  double distance = 0.0;
  int label = 0;
};

inline constexpr double kMinSquaredDistance = 1e-12;

/// Votes over neighbours sorted by ascending distance. Uniform: one vote
/// each; squared_inverse: 1 / max(d^2, 1e-12). A tied vote goes to the
/// nearest neighbour's label, or to positive when the nearest distance is
/// shared by both labels.
inline int vote(std::span<const Neighbor> sorted, KnnWeighting w) {
  if (sorted.empty()) throw Error(Errc::BadK, "vote needs at least one neighbour");
  double score[2] = {0.0, 0.0};
  for (const auto& nb : sorted)
    score[nb.label == 1] += w == KnnWeighting::Uniform ? 1.0 : 1.0 / std::max(nb.distance * nb.distance, kMinSquaredDistance);
  if (score[1] > score[0]) return 1;
  if (score[0] > score[1]) return 0;
  const double nearest = sorted.front().distance;
  const int first = sorted.front().label;
  for (const auto& nb : sorted) {
    if (nb.distance != nearest) break;
    if (nb.label != first) return 1;
  }
  return first;
}

/// Stores the training set as-is.
inline KnnModel fit_knn(const num::Matrix& x, std::span<const int> y, const KnnParams& p) {
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "fit_knn: row/label count mismatch");
  if (p.k < 1) throw Error(Errc::BadK, "k must be at least 1");
  if (p.k > x.rows())
    throw Error(Errc::KTooLarge, "k=" + std::to_string(p.k) + " exceeds training size " + std::to_string(x.rows()));
  return KnnModel{x, std::vector<int>(y.begin(), y.end()), p};
}

/// The k nearest training rows, ordered by (distance, training index).
inline std::vector<Neighbor> nearest_neighbors(const KnnModel& m, std::span<const double> x) {
  const std::size_t n = m.x.rows();
  const std::size_t k = m.params.k;
  if (k < 1) throw Error(Errc::BadK, "k must be at least 1");
  if (k > n) throw Error(Errc::KTooLarge, "k=" + std::to_string(k) + " exceeds training size " + std::to_string(n));
  if (x.size() != m.x.cols()) throw Error(Errc::DimensionMismatch, "knn expects " + std::to_string(m.x.cols()) + " features");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = distance(m.params.metric, m.x.row(i), x);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto closer = [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  std::vector<Neighbor> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = {d[idx[j]], m.y[idx[j]]};
  return out;
}

inline int knn_vote(const KnnModel& m, std::span<const double> x) {
  return vote(nearest_neighbors(m, x), m.params.weighting);
}

}  // namespace ckd
