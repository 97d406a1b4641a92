#pragma once

// The twelve benchmark classifiers behind one fit / predict interface, plus
// their default presets and a versioned JSON form for trained models.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckd/discriminant.hpp"
#include "ckd/error.hpp"
#include "ckd/knn.hpp"
#include "ckd/neural.hpp"
#include "ckd/numkernel.hpp"
#include "ckd/preprocess.hpp"
#include "ckd/svm.hpp"
#include "ckd/text.hpp"
#include "ckd/tree.hpp"

namespace ckd {

enum class ClassifierVariant {
  DecisionTree,
  LinearDiscriminant,
  QuadraticDiscriminant,
  LinearSvm,
  QuadraticSvm,
  FineKnn,
  MediumKnn,
  CosineKnn,
  CubicKnn,
  WeightedKnn,
  FfbpnnGd,
  FfbpnnLm,
};

enum class Family { Tree, Discriminant, Svm, Knn, Neural };

struct VariantInfo {
  ClassifierVariant variant;
  std::string_view id;
  std::string_view display;
  Family family;
};

// Canonical order; report tables follow it.
inline constexpr std::array<VariantInfo, 12> kVariants{{
    {ClassifierVariant::DecisionTree, "decision_tree", "Decision Tree", Family::Tree},
    {ClassifierVariant::LinearDiscriminant, "linear_discriminant", "Linear Discriminant", Family::Discriminant},
    {ClassifierVariant::QuadraticDiscriminant, "quadratic_discriminant", "Quadratic Discriminant", Family::Discriminant},
    {ClassifierVariant::LinearSvm, "linear_svm", "Linear SVM", Family::Svm},
    {ClassifierVariant::QuadraticSvm, "quadratic_svm", "Quadratic SVM", Family::Svm},
    {ClassifierVariant::FineKnn, "fine_knn", "Fine KNN", Family::Knn},
    {ClassifierVariant::MediumKnn, "medium_knn", "Medium KNN", Family::Knn},
    {ClassifierVariant::CosineKnn, "cosine_knn", "Cosine KNN", Family::Knn},
    {ClassifierVariant::CubicKnn, "cubic_knn", "Cubic KNN", Family::Knn},
    {ClassifierVariant::WeightedKnn, "weighted_knn", "Weighted KNN", Family::Knn},
    {ClassifierVariant::FfbpnnGd, "ffbpnn_gd", "FFBPNN (GD)", Family::Neural},
    {ClassifierVariant::FfbpnnLm, "ffbpnn_lm", "FFBPNN (LM)", Family::Neural},
}};

inline const VariantInfo& variant_info(ClassifierVariant v) { return kVariants[static_cast<std::size_t>(v)]; }
inline std::string variant_id(ClassifierVariant v) { return std::string(variant_info(v).id); }
inline std::string variant_display(ClassifierVariant v) { return std::string(variant_info(v).display); }
inline Family variant_family(ClassifierVariant v) { return variant_info(v).family; }
inline std::size_t variant_order(ClassifierVariant v) { return static_cast<std::size_t>(v); }

inline std::optional<ClassifierVariant> find_variant(std::string_view id) {
  for (const auto& info : kVariants)
    if (info.id == id) return info.variant;
  return std::nullopt;
}

inline ClassifierVariant parse_variant(std::string_view id) {
  if (auto v = find_variant(id)) return *v;
  throw Error(Errc::Config, "unknown classifier '" + std::string(id) + "'");
}

struct Hyperparameters {
  TreeParams tree;
  SvmParams svm;
  KnnParams knn;
  NnParams nn;
};

struct ClassifierSpec {
  ClassifierVariant variant = ClassifierVariant::DecisionTree;
  Hyperparameters hp;
};

/// Preset hyperparameters for a variant.
inline ClassifierSpec default_spec(ClassifierVariant v) {
  ClassifierSpec s{v, {}};
  switch (v) {
    case ClassifierVariant::DecisionTree: break;
    case ClassifierVariant::LinearDiscriminant: break;
    case ClassifierVariant::QuadraticDiscriminant: break;
    case ClassifierVariant::LinearSvm: s.hp.svm.kernel = SvmKernel::Linear; break;
    case ClassifierVariant::QuadraticSvm: s.hp.svm.kernel = SvmKernel::Poly2; break;
    case ClassifierVariant::FineKnn: s.hp.knn = {1, KnnMetric::Euclidean, KnnWeighting::Uniform}; break;
    case ClassifierVariant::MediumKnn: s.hp.knn = {10, KnnMetric::Euclidean, KnnWeighting::Uniform}; break;
    case ClassifierVariant::CosineKnn: s.hp.knn = {10, KnnMetric::Cosine, KnnWeighting::Uniform}; break;
    case ClassifierVariant::CubicKnn: s.hp.knn = {10, KnnMetric::Minkowski3, KnnWeighting::Uniform}; break;
    case ClassifierVariant::WeightedKnn: s.hp.knn = {10, KnnMetric::Euclidean, KnnWeighting::SquaredInverse}; break;
    case ClassifierVariant::FfbpnnGd: s.hp.nn.max_epochs = 2000; break;
    case ClassifierVariant::FfbpnnLm: s.hp.nn.max_epochs = 200; break;
  }
  return s;
}

/// Throws BadSpec when a hyperparameter relevant to the variant is out of range.
inline void validate_spec(const ClassifierSpec& s) {
  auto bad = [&](const std::string& what) { throw Error(Errc::BadSpec, variant_id(s.variant) + ": " + what); };
  switch (variant_family(s.variant)) {
    case Family::Tree:
      if (s.hp.tree.min_leaf < 1) bad("min_leaf must be at least 1");
      if (s.hp.tree.max_depth && *s.hp.tree.max_depth < 1) bad("max_depth must be at least 1");
      break;
    case Family::Discriminant: break;
    case Family::Svm:
      if (!(s.hp.svm.c > 0.0)) bad("C must be positive");
      if (!(s.hp.svm.tol > 0.0 && s.hp.svm.tol < 1.0)) bad("tol must lie in (0, 1)");
      if (s.hp.svm.max_passes && *s.hp.svm.max_passes < 1) bad("max_passes must be at least 1");
      break;
    case Family::Knn:
      if (s.hp.knn.k < 1) bad("k must be at least 1");
      break;
    case Family::Neural:
      if (s.hp.nn.hidden_units < 1) bad("hidden_units must be at least 1");
      if (s.hp.nn.max_epochs < 1) bad("max_epochs must be at least 1");
      if (!(s.hp.nn.learning_rate > 0.0)) bad("learning_rate must be positive");
      if (!(s.hp.nn.lm_damping > 0.0)) bad("lm_damping must be positive");
      if (!(s.hp.nn.lm_factor > 1.0)) bad("lm_factor must exceed 1");
      break;
  }
}

namespace detail {

inline std::size_t parse_count(std::string_view key, std::string_view value) {
  const auto v = text::parse_double(value);
  if (!v || *v < 0 || *v != std::floor(*v) || *v > 1e15)
    throw Error(Errc::Config, std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
  return static_cast<std::size_t>(*v);
}

inline double parse_real(std::string_view key, std::string_view value) {
  const auto v = text::parse_double(value);
  if (!v) throw Error(Errc::Config, std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

}  // namespace detail

/// Hyperparameter keys accepted for a variant's family.
inline std::vector<std::string> hyperparameter_keys(ClassifierVariant v) {
  switch (variant_family(v)) {
    case Family::Tree: return {"criterion", "min_leaf", "max_depth"};
    case Family::Discriminant: return {};
    case Family::Svm: return {"C", "kernel", "tol", "max_passes"};
    case Family::Knn: return {"k", "metric", "weighting"};
    case Family::Neural: return {"hidden_units", "activation", "learning_rate", "max_epochs", "lm_damping", "lm_factor", "seed"};
  }
  return {};
}

/// Applies one textual override; unknown keys for the family are Config errors.
inline void apply_override(ClassifierSpec& s, std::string_view key, std::string_view value) {
  auto& hp = s.hp;
  const auto fam = variant_family(s.variant);
  auto unknown = [&] {
    throw Error(Errc::Config, "unknown hyperparameter '" + std::string(key) + "' for " + variant_id(s.variant));
  };
  if (fam == Family::Tree) {
    if (key == "criterion") hp.tree.criterion = parse_criterion(value);
    else if (key == "min_leaf") hp.tree.min_leaf = detail::parse_count(key, value);
    else if (key == "max_depth") {
      if (text::lower(value) == "none") hp.tree.max_depth.reset();
      else hp.tree.max_depth = detail::parse_count(key, value);
    } else unknown();
  } else if (fam == Family::Svm) {
    if (key == "C") hp.svm.c = detail::parse_real(key, value);
    else if (key == "kernel") hp.svm.kernel = parse_kernel(value);
    else if (key == "tol") hp.svm.tol = detail::parse_real(key, value);
    else if (key == "max_passes") hp.svm.max_passes = detail::parse_count(key, value);
    else unknown();
  } else if (fam == Family::Knn) {
    if (key == "k") hp.knn.k = detail::parse_count(key, value);
    else if (key == "metric") hp.knn.metric = parse_metric(value);
    else if (key == "weighting") hp.knn.weighting = parse_weighting(value);
    else unknown();
  } else if (fam == Family::Neural) {
    if (key == "hidden_units") hp.nn.hidden_units = detail::parse_count(key, value);
    else if (key == "activation") hp.nn.activation = parse_activation(value);
    else if (key == "learning_rate") hp.nn.learning_rate = detail::parse_real(key, value);
    else if (key == "max_epochs") hp.nn.max_epochs = detail::parse_count(key, value);
    else if (key == "lm_damping") hp.nn.lm_damping = detail::parse_real(key, value);
    else if (key == "lm_factor") hp.nn.lm_factor = detail::parse_real(key, value);
    else if (key == "seed") hp.nn.seed = detail::parse_count(key, value);
    else unknown();
  } else {
    unknown();
  }
}

/// Hyperparameters of the variant's family only, for report echoes.
inline nlohmann::ordered_json spec_to_json(const ClassifierSpec& s) {
  nlohmann::ordered_json j;
  j["variant"] = variant_id(s.variant);
  nlohmann::ordered_json hp = nlohmann::ordered_json::object();
  switch (variant_family(s.variant)) {
    case Family::Tree:
      hp["criterion"] = criterion_name(s.hp.tree.criterion);
      hp["min_leaf"] = s.hp.tree.min_leaf;
      hp["max_depth"] = s.hp.tree.max_depth ? nlohmann::ordered_json(*s.hp.tree.max_depth) : nlohmann::ordered_json(nullptr);
      break;
    case Family::Discriminant:
      hp["kind"] = s.variant == ClassifierVariant::LinearDiscriminant ? "linear" : "quadratic";
      hp["ridge"] = "1e-6*trace/d, x10 until positive definite";
      break;
    case Family::Svm:
      hp["C"] = s.hp.svm.c;
      hp["kernel"] = kernel_name(s.hp.svm.kernel);
      hp["tol"] = s.hp.svm.tol;
      hp["max_passes"] = s.hp.svm.max_passes ? nlohmann::ordered_json(*s.hp.svm.max_passes) : nlohmann::ordered_json("200*n");
      break;
    case Family::Knn:
      hp["k"] = s.hp.knn.k;
      hp["metric"] = metric_name(s.hp.knn.metric);
      hp["weighting"] = weighting_name(s.hp.knn.weighting);
      break;
    case Family::Neural:
      hp["hidden_units"] = s.hp.nn.hidden_units;
      hp["activation"] = activation_name(s.hp.nn.activation);
      if (s.variant == ClassifierVariant::FfbpnnGd) {
        hp["learning_rate"] = s.hp.nn.learning_rate;
      } else {
        hp["lm_damping"] = s.hp.nn.lm_damping;
        hp["lm_factor"] = s.hp.nn.lm_factor;
      }
      hp["max_epochs"] = s.hp.nn.max_epochs;
      hp["seed"] = s.hp.nn.seed;
      break;
  }
  j["hyperparameters"] = std::move(hp);
  return j;
}

/// Tree and discriminant predictions do not depend on feature scale in
/// principle; everything except the tree is trained on standardized columns.
inline bool wants_standardization(ClassifierVariant v) { return v != ClassifierVariant::DecisionTree; }

using TrainedModel = std::variant<TreeModel, DiscriminantModel, SvmModel, KnnModel, NnModel>;

struct Model {
  ClassifierVariant variant = ClassifierVariant::DecisionTree;
  std::size_t features = 0;
  TrainedModel model;

  /// False when SMO or the network trainer ran out of iterations.
  bool converged() const {
    if (auto* s = std::get_if<SvmModel>(&model)) return s->converged;
    if (auto* n = std::get_if<NnModel>(&model)) return n->converged;
    return true;
  }
};

inline Model fit(const ClassifierSpec& spec, const num::Matrix& x, std::span<const int> y) {
  validate_spec(spec);
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "fit: row/label count mismatch");
  if (x.rows() == 0) throw Error(Errc::DegenerateData, "fit: no training rows");
  const auto fam = variant_family(spec.variant);
  if (fam != Family::Knn && fam != Family::Tree) {
    const auto pos = std::count(y.begin(), y.end(), 1);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y.size()))
      throw Error(Errc::DegenerateData, variant_id(spec.variant) + " needs both classes in the training data");
  }
  Model m{spec.variant, x.cols(), {}};
  switch (spec.variant) {
    case ClassifierVariant::DecisionTree: m.model = fit_tree(x, y, spec.hp.tree); break;
    case ClassifierVariant::LinearDiscriminant: m.model = fit_discriminant(x, y, DiscriminantKind::Linear); break;
    case ClassifierVariant::QuadraticDiscriminant: m.model = fit_discriminant(x, y, DiscriminantKind::Quadratic); break;
    case ClassifierVariant::LinearSvm:
    case ClassifierVariant::QuadraticSvm: {
      std::vector<int> pm(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) pm[i] = y[i] == 1 ? 1 : -1;
      m.model = smo_train(x, pm, spec.hp.svm).model;
      break;
    }
    case ClassifierVariant::FineKnn:
    case ClassifierVariant::MediumKnn:
    case ClassifierVariant::CosineKnn:
    case ClassifierVariant::CubicKnn:
    case ClassifierVariant::WeightedKnn: m.model = fit_knn(x, y, spec.hp.knn); break;
    case ClassifierVariant::FfbpnnGd: m.model = nn_train_gd(x, y, spec.hp.nn); break;
    case ClassifierVariant::FfbpnnLm: m.model = nn_train_lm(x, y, spec.hp.nn); break;
  }
  return m;
}

inline Model fit(const ClassifierSpec& spec, const FeatureMatrix& fm) { return fit(spec, fm.x, fm.y); }

inline int predict_one(const Model& m, std::span<const double> x) {
  if (x.size() != m.features)
    throw Error(Errc::DimensionMismatch,
                "model expects " + std::to_string(m.features) + " features, got " + std::to_string(x.size()));
  return std::visit(
      [&](const auto& model) -> int {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, TreeModel>) return predict_tree(model, x);
        else if constexpr (std::is_same_v<T, DiscriminantModel>) return predict_discriminant(model, x);
        else if constexpr (std::is_same_v<T, SvmModel>) return predict_svm(model, x);
        else if constexpr (std::is_same_v<T, KnnModel>) return knn_vote(model, x);
        else return predict_nn(model, x);
      },
      m.model);
}

/// One 1/0 label per row; an empty matrix gives an empty vector.
inline std::vector<int> predict(const Model& m, const num::Matrix& x) {
  std::vector<int> out;
  if (x.rows() == 0) return out;
  if (x.cols() != m.features)
    throw Error(Errc::DimensionMismatch,
                "model expects " + std::to_string(m.features) + " features, got " + std::to_string(x.cols()));
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(predict_one(m, x.row(i)));
  return out;
}

inline std::vector<int> predict(const Model& m, const FeatureMatrix& fm) { return predict(m, fm.x); }

// ---- JSON form ----

inline constexpr std::string_view kModelSchemaVersion = "ckd-model/1";

namespace detail {

inline nlohmann::ordered_json matrix_json(const num::Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

inline num::Matrix matrix_from(const nlohmann::json& j) {
  const auto r = j.at("rows").get<std::size_t>(), c = j.at("cols").get<std::size_t>();
  const auto d = j.at("data").get<std::vector<double>>();
  if (d.size() != r * c) throw Error(Errc::BadSpec, "matrix data length mismatch");
  num::Matrix m(r, c);
  std::copy(d.begin(), d.end(), m.data().begin());
  return m;
}

}  // namespace detail

inline nlohmann::ordered_json model_to_json(const Model& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["variant"] = variant_id(m.variant);
  j["features"] = m.features;
  nlohmann::ordered_json body;
  if (auto* t = std::get_if<TreeModel>(&m.model)) {
    body["criterion"] = criterion_name(t->params.criterion);
    body["min_leaf"] = t->params.min_leaf;
    body["max_depth"] = t->params.max_depth ? nlohmann::ordered_json(*t->params.max_depth) : nlohmann::ordered_json(nullptr);
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : t->nodes)
      nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                       {"label", n.label}, {"counts", {n.counts[0], n.counts[1]}}});
    body["nodes"] = std::move(nodes);
  } else if (auto* d = std::get_if<DiscriminantModel>(&m.model)) {
    body["kind"] = discriminant_kind_name(d->kind);
    body["pooled"] = d->pooled;
    for (int c = 0; c < 2; ++c) {
      nlohmann::ordered_json cls;
      cls["mean"] = d->mean[c];
      cls["covariance"] = detail::matrix_json(d->cov[c]);
      cls["log_prior"] = d->log_prior[c];
      cls["ridge"] = d->ridge[c];
      body[c == 1 ? "positive" : "negative"] = std::move(cls);
    }
  } else if (auto* s = std::get_if<SvmModel>(&m.model)) {
    body["kernel"] = kernel_name(s->kernel);
    body["C"] = s->c;
    body["b"] = s->b;
    body["converged"] = s->converged;
    body["iterations"] = s->iterations;
    body["alpha"] = s->alpha;
    body["coef"] = s->coef;
    body["support_vectors"] = detail::matrix_json(s->support_vectors);
  } else if (auto* k = std::get_if<KnnModel>(&m.model)) {
    body["k"] = k->params.k;
    body["metric"] = metric_name(k->params.metric);
    body["weighting"] = weighting_name(k->params.weighting);
    body["x"] = detail::matrix_json(k->x);
    body["y"] = k->y;
  } else if (auto* n = std::get_if<NnModel>(&m.model)) {
    body["activation"] = activation_name(n->activation);
    body["converged"] = n->converged;
    body["epochs"] = n->epochs;
    auto layers = nlohmann::ordered_json::array();
    for (const auto& l : n->layers) layers.push_back({{"w", detail::matrix_json(l.w)}, {"b", l.b}});
    body["layers"] = std::move(layers);
  }
  j["model"] = std::move(body);
  return j;
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<std::string>() != kModelSchemaVersion)
      throw Error(Errc::BadSpec, "unsupported model schema_version");
    Model m;
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.features = j.at("features").get<std::size_t>();
    const auto& b = j.at("model");
    switch (variant_family(m.variant)) {
      case Family::Tree: {
        TreeModel t;
        t.n_features = m.features;
        t.params.criterion = parse_criterion(b.at("criterion").get<std::string>());
        t.params.min_leaf = b.at("min_leaf").get<std::size_t>();
        if (!b.at("max_depth").is_null()) t.params.max_depth = b.at("max_depth").get<std::size_t>();
        for (const auto& n : b.at("nodes")) {
          TreeNode node;
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          node.label = n.at("label").get<int>();
          node.counts = {n.at("counts").at(0).get<std::size_t>(), n.at("counts").at(1).get<std::size_t>()};
          t.nodes.push_back(node);
        }
        m.model = std::move(t);
        break;
      }
      case Family::Discriminant: {
        DiscriminantModel d;
        d.kind = b.at("kind").get<std::string>() == "linear" ? DiscriminantKind::Linear : DiscriminantKind::Quadratic;
        d.pooled = b.at("pooled").get<bool>();
        for (int c = 0; c < 2; ++c) {
          const auto& cls = b.at(c == 1 ? "positive" : "negative");
          d.mean[c] = cls.at("mean").get<num::Vector>();
          d.cov[c] = detail::matrix_from(cls.at("covariance"));
          d.log_prior[c] = cls.at("log_prior").get<double>();
          d.ridge[c] = cls.at("ridge").get<double>();
          d.chol[c] = num::cholesky(d.cov[c]);
        }
        finish_discriminant(d);
        m.model = std::move(d);
        break;
      }
      case Family::Svm: {
        SvmModel s;
        s.kernel = parse_kernel(b.at("kernel").get<std::string>());
        s.c = b.at("C").get<double>();
        s.b = b.at("b").get<double>();
        s.converged = b.at("converged").get<bool>();
        s.iterations = b.at("iterations").get<std::size_t>();
        s.alpha = b.at("alpha").get<std::vector<double>>();
        s.coef = b.at("coef").get<std::vector<double>>();
        s.support_vectors = detail::matrix_from(b.at("support_vectors"));
        m.model = std::move(s);
        break;
      }
      case Family::Knn: {
        KnnModel k;
        k.params.k = b.at("k").get<std::size_t>();
        k.params.metric = parse_metric(b.at("metric").get<std::string>());
        k.params.weighting = parse_weighting(b.at("weighting").get<std::string>());
        k.x = detail::matrix_from(b.at("x"));
        k.y = b.at("y").get<std::vector<int>>();
        m.model = std::move(k);
        break;
      }
      case Family::Neural: {
        NnModel n;
        n.activation = parse_activation(b.at("activation").get<std::string>());
        n.converged = b.at("converged").get<bool>();
        n.epochs = b.at("epochs").get<std::size_t>();
        for (const auto& l : b.at("layers")) n.layers.push_back({detail::matrix_from(l.at("w")), l.at("b").get<num::Vector>()});
        m.model = std::move(n);
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadSpec, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace ckd
