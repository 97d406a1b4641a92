#pragma once

// k-fold cross-validation, confusion counts and the four reported metrics.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckd/classifier.hpp"
#include "ckd/dataset.hpp"
#include "ckd/error.hpp"
#include "ckd/parallel.hpp"
#include "ckd/preprocess.hpp"
#include "ckd/rng.hpp"
#include "ckd/version.hpp"

namespace ckd {

// ---- fold plans ----

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index per row
  std::uint64_t seed = 0;
  bool stratified = false;

  std::size_t rows() const noexcept { return assignments.size(); }

  std::vector<std::size_t> test_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> train_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] != fold) out.push_back(i);
    return out;
  }

  /// FNV-1a over (k, seed, stratified, assignments) as 16 hex digits.
  std::string hash() const {
    std::vector<unsigned char> bytes;
    auto put = [&](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(v >> (8 * b)));
    };
    put(k);
    put(seed);
    put(stratified ? 1 : 0);
    for (auto a : assignments) put(a);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
  }

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Seeded shuffle, then round-robin assignment. Stratified plans shuffle each
/// class separately (positives first) and keep one round-robin counter
/// running across both classes.
inline FoldPlan kfold_partition(std::size_t n, std::size_t k, std::uint64_t seed, bool stratified = false,
                                std::span<const int> labels = {}) {
  if (k < 2 || k > n)
    throw Error(Errc::BadK, "fold count k=" + std::to_string(k) + " must satisfy 2 <= k <= " + std::to_string(n));
  if (stratified && labels.size() != n)
    throw Error(Errc::LengthMismatch, "stratified partition needs one label per row");
  FoldPlan plan{k, std::vector<std::size_t>(n, 0), seed, stratified};
  Rng rng(seed);
  std::size_t counter = 0;
  auto deal = [&](std::vector<std::size_t> idx) {
    rng.shuffle(std::span<std::size_t>(idx));
    for (auto i : idx) plan.assignments[i] = counter++ % k;
  };
  if (!stratified) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    deal(std::move(idx));
  } else {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (labels[i] == 1 ? pos : neg).push_back(i);
    deal(std::move(pos));
    deal(std::move(neg));
  }
  return plan;
}

// ---- confusion and metrics ----

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp, fp += o.fp, tn += o.tn, fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Labels are 1 (positive) / 0 (negative).
inline ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw Error(Errc::LengthMismatch, "confusion: " + std::to_string(predicted.size()) + " predictions for " +
                                          std::to_string(truth.size()) + " labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == 1, t = truth[i] == 1;
    if (p && t) ++cm.tp;
    else if (p) ++cm.fp;
    else if (t) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

/// Token form: a label counts as positive when it equals `positive`.
inline ConfusionMatrix confusion(std::span<const std::string> predicted, std::span<const std::string> truth,
                                 const std::string& positive) {
  if (predicted.size() != truth.size()) throw Error(Errc::LengthMismatch, "confusion: label vectors differ in length");
  std::vector<int> p(predicted.size()), t(truth.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = predicted[i] == positive;
    t[i] = truth[i] == positive;
  }
  return confusion(p, t);
}

/// Empty optional = undefined (zero denominator).
struct Metrics {
  std::optional<double> accuracy, sensitivity, specificity, precision;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

inline Metrics compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(Errc::EmptyMatrix, "metrics of an empty confusion matrix");
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(cm.tp + cm.tn, cm.total()), ratio(cm.tp, cm.tp + cm.fn), ratio(cm.tn, cm.tn + cm.fp),
          ratio(cm.tp, cm.tp + cm.fp)};
}

/// Average of each metric over the folds where it is defined.
inline Metrics mean_metrics(std::span<const Metrics> folds) {
  auto avg = [&](std::optional<double> Metrics::*field) -> std::optional<double> {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& m : folds)
      if (m.*field) s += *(m.*field), ++n;
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
  };
  return {avg(&Metrics::accuracy), avg(&Metrics::sensitivity), avg(&Metrics::specificity), avg(&Metrics::precision)};
}

// ---- cross-validation ----

struct EvalOptions {
  ImputationScope scope = ImputationScope::WholeDataset;
  bool standardize = true;  // applied only to variants that want it
  std::size_t threads = 1;  // concurrent folds; 0 = hardware concurrency
};

struct FoldData {
  std::size_t fold = 0;
  std::uint64_t seed = 0;  // derived from the plan seed and fold index
  FeatureMatrix train;
  FeatureMatrix test;
};

/// Fits on fold.train and returns one 1/0 prediction per fold.test row.
using Learner = std::function<std::vector<int>(const FoldData&)>;

struct EvalResult {
  std::string classifier;
  nlohmann::ordered_json spec;  // hyperparameter echo
  std::uint64_t seed = 0;
  std::string plan_hash;
  std::size_t folds = 0;
  std::string scope;
  ConfusionMatrix pooled;
  Metrics pooled_metrics;
  std::vector<ConfusionMatrix> fold_confusion;
  std::vector<Metrics> per_fold;
  Metrics fold_mean;
  std::vector<int> predictions;  // out-of-fold prediction for every row
  bool converged = true;         // false if any fold's trainer hit its budget
  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

inline std::uint64_t fold_seed(std::uint64_t base, std::size_t fold) { return mix_seed(base, fold); }

namespace detail {

inline Error fold_error(std::size_t fold, const Error& e) {
  return Error(e.code(), "fold " + std::to_string(fold) + ": " + e.message());
}

}  // namespace detail

/// Per fold: impute per scope, encode, optionally standardize on training
/// statistics, fit, predict. Folds may run concurrently; results are
/// assembled in fold order.
inline EvalResult cross_validate_with(const Dataset& ds, const FoldPlan& plan, const EvalOptions& opts,
                                      bool standardize, const Learner& learner, std::uint64_t seed_base) {
  if (plan.rows() != ds.size())
    throw Error(Errc::LengthMismatch, "fold plan covers " + std::to_string(plan.rows()) + " rows, dataset has " +
                                          std::to_string(ds.size()));
  std::optional<FeatureMatrix> whole;
  if (opts.scope == ImputationScope::WholeDataset)
    whole = encode(impute(ds, build_imputation_plan(ds, ImputationScope::WholeDataset)));

  std::vector<std::vector<int>> fold_pred(plan.k);
  std::vector<std::vector<std::size_t>> fold_rows(plan.k);
  std::vector<FeatureMatrix> fold_truth(plan.k);
  parallel_for(plan.k, opts.threads, [&](std::size_t f) {
    try {
      const auto train_idx = plan.train_rows(f);
      const auto test_idx = plan.test_rows(f);
      FoldData fd;
      fd.fold = f;
      fd.seed = fold_seed(seed_base, f);
      if (whole) {
        fd.train = whole->select(train_idx);
        fd.test = whole->select(test_idx);
      } else {
        const auto ip = build_imputation_plan(ds, ImputationScope::TrainFoldOnly, train_idx);
        fd.train = encode(impute(ds, ip, FillSource::ClassConditional)).select(train_idx);
        fd.test = encode(impute(ds, ip, FillSource::Global)).select(test_idx);
      }
      if (standardize) {
        const auto st = fit_standardization(fd.train.x);
        fd.train = ckd::standardize(fd.train, st);
        fd.test = ckd::standardize(fd.test, st);
      }
      auto pred = learner(fd);
      if (pred.size() != test_idx.size()) throw Error(Errc::LengthMismatch, "learner returned wrong prediction count");
      fold_pred[f] = std::move(pred);
      fold_rows[f] = test_idx;
      fold_truth[f] = std::move(fd.test);
    } catch (const Error& e) {
      throw detail::fold_error(f, e);
    }
  });

  EvalResult r;
  r.seed = plan.seed;
  r.plan_hash = plan.hash();
  r.folds = plan.k;
  r.scope = scope_name(opts.scope);
  r.predictions.assign(ds.size(), 0);
  for (std::size_t f = 0; f < plan.k; ++f) {
    const auto cm = confusion(fold_pred[f], fold_truth[f].y);
    r.fold_confusion.push_back(cm);
    r.per_fold.push_back(fold_truth[f].rows() ? compute_metrics(cm) : Metrics{});
    r.pooled += cm;
    for (std::size_t i = 0; i < fold_rows[f].size(); ++i) r.predictions[fold_rows[f][i]] = fold_pred[f][i];
  }
  r.pooled_metrics = compute_metrics(r.pooled);
  r.fold_mean = mean_metrics(r.per_fold);
  return r;
}

/// Cross-validates one classifier spec. The network seed of fold f is
/// mix(mix(plan seed, spec seed), f).
inline EvalResult cross_validate(const ClassifierSpec& spec, const Dataset& ds, const FoldPlan& plan,
                                 const EvalOptions& opts = {}) {
  validate_spec(spec);
  std::vector<char> fold_converged(plan.k, 1);
  const std::uint64_t base = mix_seed(plan.seed, spec.hp.nn.seed);
  const Learner learner = [&](const FoldData& fd) {
    ClassifierSpec s = spec;
    s.hp.nn.seed = fd.seed;
    const auto model = fit(s, fd.train);
    fold_converged[fd.fold] = model.converged();
    return predict(model, fd.test);
  };
  auto r = cross_validate_with(ds, plan, opts, opts.standardize && wants_standardization(spec.variant), learner, base);
  r.classifier = variant_id(spec.variant);
  r.spec = spec_to_json(spec);
  for (char c : fold_converged) r.converged = r.converged && c;
  return r;
}

// ---- JSON ----

namespace detail {

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<double> optional_from(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json confusion_to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

inline ConfusionMatrix confusion_from_json(const nlohmann::ordered_json& j) {
  return {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("tn").get<std::size_t>(),
          j.at("fn").get<std::size_t>()};
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  return {{"accuracy", detail::optional_json(m.accuracy)},
          {"sensitivity", detail::optional_json(m.sensitivity)},
          {"precision", detail::optional_json(m.precision)},
          {"specificity", detail::optional_json(m.specificity)}};
}

inline Metrics metrics_from_json(const nlohmann::ordered_json& j) {
  return {detail::optional_from(j.at("accuracy")), detail::optional_from(j.at("sensitivity")),
          detail::optional_from(j.at("specificity")), detail::optional_from(j.at("precision"))};
}

inline nlohmann::ordered_json eval_to_json(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["classifier"] = r.classifier;
  j["spec"] = r.spec;
  j["seed"] = r.seed;
  j["plan_hash"] = r.plan_hash;
  j["folds"] = r.folds;
  j["imputation_scope"] = r.scope;
  j["converged"] = r.converged;
  j["pooled"] = {{"confusion", confusion_to_json(r.pooled)}, {"metrics", metrics_to_json(r.pooled_metrics)}};
  auto folds = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < r.per_fold.size(); ++f)
    folds.push_back({{"confusion", confusion_to_json(r.fold_confusion[f])}, {"metrics", metrics_to_json(r.per_fold[f])}});
  j["per_fold"] = std::move(folds);
  j["fold_mean"] = metrics_to_json(r.fold_mean);
  j["predictions"] = r.predictions;
  j["code_version"] = kVersion;
  return j;
}

inline EvalResult eval_from_json(const nlohmann::ordered_json& j) {
  EvalResult r;
  r.classifier = j.at("classifier").get<std::string>();
  r.spec = j.at("spec");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.plan_hash = j.at("plan_hash").get<std::string>();
  r.folds = j.at("folds").get<std::size_t>();
  r.scope = j.at("imputation_scope").get<std::string>();
  r.converged = j.at("converged").get<bool>();
  r.pooled = confusion_from_json(j.at("pooled").at("confusion"));
  r.pooled_metrics = metrics_from_json(j.at("pooled").at("metrics"));
  for (const auto& f : j.at("per_fold")) {
    r.fold_confusion.push_back(confusion_from_json(f.at("confusion")));
    r.per_fold.push_back(metrics_from_json(f.at("metrics")));
  }
  r.fold_mean = metrics_from_json(j.at("fold_mean"));
  r.predictions = j.at("predictions").get<std::vector<int>>();
  return r;
}

}  // namespace ckd
