#pragma once

// Missing-value imputation (class-conditional mean for numeric and discrete
// columns, class-conditional mode for nominal ones), one-hot encoding into a
// dense feature matrix, and z-score standardization.

#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckd/dataset.hpp"
#include "ckd/numkernel.hpp"

namespace ckd {

enum class ImputationScope { WholeDataset, TrainFoldOnly };

inline std::string scope_name(ImputationScope s) {
  return s == ImputationScope::WholeDataset ? "whole_dataset" : "train_fold_only";
}

inline ImputationScope parse_scope(std::string_view s) {
  if (s == "whole_dataset") return ImputationScope::WholeDataset;
  if (s == "train_fold_only") return ImputationScope::TrainFoldOnly;
  throw Error(Errc::Config, "unknown imputation scope '" + std::string(s) + "'");
}

/// Fill values per attribute. `by_class[j][0]` is used for positive rows and
/// `by_class[j][1]` for negative rows; `global[j]` ignores the label and is
/// what unlabeled (test-fold) rows receive under TrainFoldOnly. Numeric fills
/// are Real means at full precision, nominal fills are tokens.
struct ImputationPlan {
  ImputationScope scope = ImputationScope::WholeDataset;
  std::string positive_label;
  std::string negative_label;
  std::vector<std::string> attributes;
  std::vector<std::array<CellValue, 2>> by_class;
  std::vector<CellValue> global;
};

namespace detail {

struct ColumnStats {
  double sum = 0.0;
  std::size_t count = 0;
  std::vector<std::size_t> votes;  // per allowed value, nominal only
};

inline CellValue fill_from(const ColumnStats& st, const Attribute& attr) {
  if (st.count == 0) return Missing{};
  if (const auto* nom = std::get_if<Nominal>(&attr.kind)) {
    // First allowed value wins a tie.
    std::size_t best = 0;
    for (std::size_t k = 1; k < st.votes.size(); ++k)
      if (st.votes[k] > st.votes[best]) best = k;
    return nom->values[best];
  }
  return st.sum / static_cast<double>(st.count);
}

}  // namespace detail

/// Builds the plan from the rows listed in `rows` (all rows when empty).
inline ImputationPlan build_imputation_plan(const Dataset& ds, ImputationScope scope,
                                            std::span<const std::size_t> rows = {}) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(ds.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  const auto& schema = ds.schema;
  ImputationPlan plan{scope, schema.positive_label, schema.negative_label, {}, {}, {}};
  std::array<std::size_t, 2> class_rows{0, 0};
  for (auto i : rows) ++class_rows[ds.is_positive(i) ? 0 : 1];

  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& attr = schema.attributes[j];
    const auto* nom = std::get_if<Nominal>(&attr.kind);
    std::array<detail::ColumnStats, 2> per_class;
    detail::ColumnStats overall;
    for (auto* st : {&per_class[0], &per_class[1], &overall})
      if (nom) st->votes.assign(nom->values.size(), 0);
    for (auto i : rows) {
      const auto& cell = ds.rows[i].cells[j];
      if (is_missing(cell)) continue;
      auto& st = per_class[ds.is_positive(i) ? 0 : 1];
      for (auto* s : {&st, &overall}) {
        ++s->count;
        if (nom) {
          const auto& tok = std::get<std::string>(cell);
          const auto pos = std::find(nom->values.begin(), nom->values.end(), tok) - nom->values.begin();
          ++s->votes[static_cast<std::size_t>(pos)];
        } else {
          s->sum += as_real(cell);
        }
      }
    }
    for (int c = 0; c < 2; ++c) {
      if (class_rows[c] > 0 && per_class[c].count == 0)
        throw Error(Errc::AllMissingForClass,
                    "attribute '" + attr.name + "' has no observed value for class '" +
                        (c == 0 ? schema.positive_label : schema.negative_label) + "'");
    }
    plan.attributes.push_back(attr.name);
    plan.by_class.push_back({detail::fill_from(per_class[0], attr), detail::fill_from(per_class[1], attr)});
    plan.global.push_back(detail::fill_from(overall, attr));
  }
  return plan;
}

enum class FillSource { ClassConditional, Global };

/// Replaces every Missing cell. Observed cells are copied unchanged.
inline Dataset impute(const Dataset& ds, const ImputationPlan& plan, FillSource source = FillSource::ClassConditional) {
  if (plan.attributes.size() != ds.schema.size())
    throw Error(Errc::PlanGap, "plan covers " + std::to_string(plan.attributes.size()) + " attributes, dataset has " +
                                   std::to_string(ds.schema.size()));
  Dataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& row = out.rows[i];
    const int c = out.is_positive(i) ? 0 : 1;
    for (std::size_t j = 0; j < row.cells.size(); ++j) {
      if (!is_missing(row.cells[j])) continue;
      const auto& fill = source == FillSource::ClassConditional ? plan.by_class[j][c] : plan.global[j];
      if (is_missing(fill))
        throw Error(Errc::PlanGap, "no fill value for attribute '" + plan.attributes[j] + "'");
      row.cells[j] = fill;
    }
  }
  return out;
}

inline nlohmann::json plan_to_json(const ImputationPlan& plan) {
  auto value = [](const CellValue& v) -> nlohmann::json {
    if (is_missing(v)) return nullptr;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return as_real(v);
  };
  nlohmann::json attrs = nlohmann::json::object();
  for (std::size_t j = 0; j < plan.attributes.size(); ++j) {
    attrs[plan.attributes[j]] = {{plan.positive_label, value(plan.by_class[j][0])},
                                 {plan.negative_label, value(plan.by_class[j][1])},
                                 {"global", value(plan.global[j])}};
  }
  return {{"scope", scope_name(plan.scope)}, {"fills", std::move(attrs)}};
}

/// Dense numeric features, row-aligned with labels (1 = positive, 0 = negative).
struct FeatureMatrix {
  num::Matrix x;
  std::vector<std::string> feature_names;
  std::vector<int> y;

  std::size_t rows() const noexcept { return x.rows(); }
  std::size_t features() const noexcept { return x.cols(); }

  FeatureMatrix select(std::span<const std::size_t> idx) const {
    FeatureMatrix out{x.select_rows(idx), feature_names, {}};
    out.y.reserve(idx.size());
    for (auto i : idx) out.y.push_back(y[i]);
    return out;
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Numeric and discrete columns pass through; every nominal column becomes
/// one indicator per allowed value, in allowed-value order.
struct EncodingPolicy {
  enum class NominalStrategy { OneHot } nominal_strategy = NominalStrategy::OneHot;
};

inline std::vector<std::string> encoded_feature_names(const Schema& schema) {
  std::vector<std::string> names;
  for (const auto& a : schema.attributes) {
    if (const auto* nom = std::get_if<Nominal>(&a.kind)) {
      for (const auto& v : nom->values) names.push_back(a.name + "=" + v);
    } else {
      names.push_back(a.name);
    }
  }
  return names;
}

inline FeatureMatrix encode(const Dataset& ds, const EncodingPolicy& = {}) {
  FeatureMatrix fm;
  fm.feature_names = encoded_feature_names(ds.schema);
  const std::size_t width = fm.feature_names.size();
  fm.x = num::Matrix(ds.size(), width);
  fm.y.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto out = fm.x.row(i);
    std::size_t col = 0;
    for (std::size_t j = 0; j < ds.schema.size(); ++j) {
      const auto& cell = ds.rows[i].cells[j];
      const auto& attr = ds.schema.attributes[j];
      if (is_missing(cell))
        throw Error(Errc::ResidualMissing, "row " + std::to_string(i) + ", attribute '" + attr.name + "' is missing");
      if (const auto* nom = std::get_if<Nominal>(&attr.kind)) {
        const auto& tok = std::get<std::string>(cell);
        for (const auto& v : nom->values) out[col++] = v == tok ? 1.0 : 0.0;
      } else {
        out[col++] = as_real(cell);
      }
    }
    fm.y.push_back(ds.is_positive(i) ? 1 : 0);
  }
  return fm;
}

inline constexpr double kStddevFloor = 1e-12;

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population stddev, floored at kStddevFloor
};

inline StandardizationStats fit_standardization(const num::Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  StandardizationStats st{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  if (n == 0) {
    std::fill(st.stddev.begin(), st.stddev.end(), 1.0);
    return st;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) st.mean[j] += x(i, j);
  for (auto& m : st.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - st.mean[j];
      st.stddev[j] += c * c;
    }
  for (auto& s : st.stddev) s = std::max(std::sqrt(s / static_cast<double>(n)), kStddevFloor);
  return st;
}

inline num::Matrix standardize(const num::Matrix& x, const StandardizationStats& st) {
  if (st.mean.size() != x.cols() || st.stddev.size() != x.cols())
    throw Error(Errc::DimensionMismatch, "standardization stats have " + std::to_string(st.mean.size()) +
                                             " features, matrix has " + std::to_string(x.cols()));
  num::Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - st.mean[j]) / st.stddev[j];
  return out;
}

inline FeatureMatrix standardize(const FeatureMatrix& fm, const StandardizationStats& st) {
  return {standardize(fm.x, st), fm.feature_names, fm.y};
}

/// Fit-from-input variant.
inline FeatureMatrix standardize(const FeatureMatrix& fm) { return standardize(fm, fit_standardization(fm.x)); }

}  // namespace ckd
