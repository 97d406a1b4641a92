#pragma once

// Binary CART tree over numeric features. One-hot indicator columns split at
// 0.5 like any other numeric column. Labels are 1 (positive) / 0 (negative).

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckd/error.hpp"
#include "ckd/numkernel.hpp"

namespace ckd {

enum class SplitCriterion { Gini, InfoGain };

inline std::string criterion_name(SplitCriterion c) { return c == SplitCriterion::Gini ? "gini" : "info_gain"; }

inline SplitCriterion parse_criterion(std::string_view s) {
  if (s == "gini") return SplitCriterion::Gini;
  if (s == "info_gain" || s == "entropy") return SplitCriterion::InfoGain;
  throw Error(Errc::Config, "unknown split criterion '" + std::string(s) + "'");
}

using ClassCounts = std::array<std::size_t, 2>;  // [negatives, positives]

/// Gini impurity, or entropy in bits, of a two-class node.
inline double impurity(const ClassCounts& c, SplitCriterion crit) {
  const double n = static_cast<double>(c[0] + c[1]);
  if (n == 0.0) return 0.0;
  const double p0 = static_cast<double>(c[0]) / n;
  const double p1 = static_cast<double>(c[1]) / n;
  if (crit == SplitCriterion::Gini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  for (double p : {p0, p1})
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

inline double impurity_decrease(const ClassCounts& left, const ClassCounts& right, SplitCriterion crit) {
  const ClassCounts parent{left[0] + right[0], left[1] + right[1]};
  const double n = static_cast<double>(parent[0] + parent[1]);
  const double nl = static_cast<double>(left[0] + left[1]);
  const double nr = static_cast<double>(right[0] + right[1]);
  return impurity(parent, crit) - (nl / n) * impurity(left, crit) - (nr / n) * impurity(right, crit);
}

// Scores closer than this are a tie; the earlier candidate wins.
inline constexpr double kScoreTieEps = 1e-12;

struct SplitCandidate {
  std::optional<double> threshold;  // go left when x <= threshold; empty for a constant column
  double score = 0.0;
};

/// Best midpoint threshold of one column: scans the gaps between consecutive
/// distinct sorted values, keeps the largest impurity decrease, lowest
/// threshold on ties. Both sides must hold at least `min_leaf` samples.
inline SplitCandidate split_score(std::span<const double> values, std::span<const int> labels, SplitCriterion crit,
                                  std::size_t min_leaf = 1) {
  if (values.size() != labels.size()) throw Error(Errc::LengthMismatch, "split_score: values and labels differ in length");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  ClassCounts total{0, 0};
  for (int y : labels) ++total[y == 1];
  ClassCounts left{0, 0};
  SplitCandidate best;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    ++left[labels[order[k]] == 1];
    const double lo = values[order[k]], hi = values[order[k + 1]];
    if (!(lo < hi)) continue;
    const std::size_t nl = k + 1;
    if (nl < min_leaf || n - nl < min_leaf) continue;
    const ClassCounts right{total[0] - left[0], total[1] - left[1]};
    const double score = impurity_decrease(left, right, crit);
    if (!best.threshold || score > best.score + kScoreTieEps) {
      best.threshold = lo + (hi - lo) / 2.0;
      best.score = score;
    }
  }
  return best;
}

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::Gini;
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
  ClassCounts counts{0, 0};
  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t n_features = 0;
  TreeParams params;

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
  }
  std::size_t depth(int node = 0) const {
    const auto& n = nodes[static_cast<std::size_t>(node)];
    return n.is_leaf() ? 0 : 1 + std::max(depth(n.left), depth(n.right));
  }
};

namespace detail {

inline int majority(const ClassCounts& c) { return c[1] >= c[0] ? 1 : 0; }

class TreeBuilder {
 public:
  TreeBuilder(const num::Matrix& x, std::span<const int> y, const TreeParams& p) : x_(x), y_(y), p_(p) {}

  TreeModel build() {
    TreeModel m;
    m.n_features = x_.cols();
    m.params = p_;
    std::vector<std::size_t> rows(x_.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    nodes_.clear();
    grow(rows, 0);
    m.nodes = std::move(nodes_);
    return m;
  }

 private:
  int grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    ClassCounts counts{0, 0};
    for (auto r : rows) ++counts[y_[r] == 1];
    nodes_[id].counts = counts;
    nodes_[id].label = majority(counts);

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool depth_cap = p_.max_depth && depth >= *p_.max_depth;
    if (pure || depth_cap || rows.size() < 2 * std::max<std::size_t>(p_.min_leaf, 1)) return id;

    int best_feature = -1;
    SplitCandidate best;
    std::vector<double> col(rows.size());
    std::vector<int> lab(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) lab[k] = y_[rows[k]];
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      for (std::size_t k = 0; k < rows.size(); ++k) col[k] = x_(rows[k], f);
      const auto cand = split_score(col, lab, p_.criterion, p_.min_leaf);
      if (!cand.threshold) continue;
      if (best_feature < 0 || cand.score > best.score + kScoreTieEps) {
        best = cand;
        best_feature = static_cast<int>(f);
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_(r, static_cast<std::size_t>(best_feature)) <= *best.threshold ? left : right).push_back(r);
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = *best.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  const num::Matrix& x_;
  std::span<const int> y_;
  TreeParams p_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// Grows the tree to purity (subject to min_leaf / max_depth). A single-class
/// training set yields one leaf.
inline TreeModel fit_tree(const num::Matrix& x, std::span<const int> y, const TreeParams& params = {}) {
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "fit_tree: row/label count mismatch");
  if (x.rows() == 0) throw Error(Errc::DegenerateData, "fit_tree: no training rows");
  if (params.min_leaf < 1) throw Error(Errc::BadSpec, "min_leaf must be at least 1");
  return detail::TreeBuilder(x, y, params).build();
}

inline int predict_tree(const TreeModel& m, std::span<const double> x) {
  if (x.size() != m.n_features) throw Error(Errc::DimensionMismatch, "tree expects " + std::to_string(m.n_features) + " features");
  int id = 0;
  for (;;) {
    const auto& n = m.nodes[static_cast<std::size_t>(id)];
    if (n.is_leaf()) return n.label;
    id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
}

}  // namespace ckd
