#include <set>

#include <gtest/gtest.h>

#include "ckd/classifier.hpp"
#include "ckd/synth.hpp"
#include "test_support.hpp"

using namespace ckd;

namespace {

const FeatureMatrix& separated_fixture() {
  static const FeatureMatrix fm = standardize(encode(synth_generate(separated_gaussians(), 200, 17)));
  return fm;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

}  // namespace

TEST(Classifier, TwelveVariantsWithCanonicalIdsAndNames) {
  ASSERT_EQ(kVariants.size(), 12u);
  const char* ids[] = {"decision_tree", "linear_discriminant", "quadratic_discriminant", "linear_svm",
                       "quadratic_svm", "fine_knn",           "medium_knn",             "cosine_knn",
                       "cubic_knn",     "weighted_knn",       "ffbpnn_gd",              "ffbpnn_lm"};
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(kVariants[i].id, ids[i]);
    EXPECT_EQ(variant_order(parse_variant(ids[i])), i);
  }
  EXPECT_EQ(variant_display(ClassifierVariant::FfbpnnGd), "FFBPNN (GD)");
  EXPECT_EQ(variant_display(ClassifierVariant::QuadraticSvm), "Quadratic SVM");
  EXPECT_THROW(parse_variant("random_forest"), Error);
}

TEST(Classifier, PresetHyperparameters) {
  EXPECT_EQ(default_spec(ClassifierVariant::FineKnn).hp.knn.k, 1u);
  EXPECT_EQ(default_spec(ClassifierVariant::MediumKnn).hp.knn.k, 10u);
  EXPECT_EQ(default_spec(ClassifierVariant::CosineKnn).hp.knn.metric, KnnMetric::Cosine);
  EXPECT_EQ(default_spec(ClassifierVariant::CubicKnn).hp.knn.metric, KnnMetric::Minkowski3);
  EXPECT_EQ(default_spec(ClassifierVariant::WeightedKnn).hp.knn.weighting, KnnWeighting::SquaredInverse);
  EXPECT_EQ(default_spec(ClassifierVariant::QuadraticSvm).hp.svm.kernel, SvmKernel::Poly2);
  EXPECT_EQ(default_spec(ClassifierVariant::LinearSvm).hp.svm.c, 1.0);
  EXPECT_EQ(default_spec(ClassifierVariant::LinearSvm).hp.svm.tol, 1e-3);
  EXPECT_EQ(default_spec(ClassifierVariant::FfbpnnGd).hp.nn.max_epochs, 2000u);
  EXPECT_EQ(default_spec(ClassifierVariant::FfbpnnGd).hp.nn.learning_rate, 0.05);
  EXPECT_EQ(default_spec(ClassifierVariant::FfbpnnLm).hp.nn.max_epochs, 200u);
  EXPECT_EQ(default_spec(ClassifierVariant::FfbpnnLm).hp.nn.lm_damping, 1e-3);
  EXPECT_EQ(default_spec(ClassifierVariant::FfbpnnLm).hp.nn.hidden_units, 10u);
  EXPECT_EQ(default_spec(ClassifierVariant::DecisionTree).hp.tree.criterion, SplitCriterion::Gini);
}

TEST(Classifier, OverridesAreParsedStrictly) {
  auto s = default_spec(ClassifierVariant::MediumKnn);
  apply_override(s, "k", "7");
  apply_override(s, "metric", "cosine");
  EXPECT_EQ(s.hp.knn.k, 7u);
  EXPECT_EQ(s.hp.knn.metric, KnnMetric::Cosine);
  EXPECT_THROW(apply_override(s, "C", "1"), Error);
  EXPECT_THROW(apply_override(s, "k", "2.5"), Error);
  auto t = default_spec(ClassifierVariant::DecisionTree);
  apply_override(t, "criterion", "info_gain");
  apply_override(t, "max_depth", "4");
  EXPECT_EQ(t.hp.tree.criterion, SplitCriterion::InfoGain);
  EXPECT_EQ(t.hp.tree.max_depth, 4u);
  auto d = default_spec(ClassifierVariant::LinearDiscriminant);
  EXPECT_THROW(apply_override(d, "k", "1"), Error);
  auto svm = default_spec(ClassifierVariant::LinearSvm);
  apply_override(svm, "C", "0");
  EXPECT_THROW(validate_spec(svm), Error);
}

TEST(Classifier, EveryVariantFitsTheSeparatedFixture) {
  const auto& fm = separated_fixture();
  for (const auto& info : kVariants) {
    const auto m = fit(default_spec(info.variant), fm);
    EXPECT_GE(accuracy(predict(m, fm), fm.y), 0.95) << info.id;
  }
}

TEST(Classifier, FitAndPredictAreDeterministic) {
  const auto& fm = separated_fixture();
  for (const auto& info : kVariants) {
    const auto spec = default_spec(info.variant);
    const auto a = fit(spec, fm), b = fit(spec, fm);
    EXPECT_EQ(model_to_json(a).dump(), model_to_json(b).dump()) << info.id;
    EXPECT_EQ(predict(a, fm), predict(b, fm)) << info.id;
  }
}

TEST(Classifier, JsonRoundTripPreservesPredictions) {
  const auto& fm = separated_fixture();
  Rng rng(1);
  const auto probe = testing_support::random_matrix(50, fm.features(), rng, -3, 3);
  for (const auto& info : kVariants) {
    const auto m = fit(default_spec(info.variant), fm);
    const auto j = model_to_json(m);
    EXPECT_EQ(j["schema_version"], "ckd-model/1");
    const auto back = model_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(model_to_json(back).dump(), j.dump()) << info.id;
    EXPECT_EQ(predict(back, probe), predict(m, probe)) << info.id;
  }
}

TEST(Classifier, EmptyInputPredictsNothing) {
  const auto& fm = separated_fixture();
  for (const auto& info : kVariants) {
    const auto m = fit(default_spec(info.variant), fm);
    EXPECT_TRUE(predict(m, num::Matrix(0, fm.features())).empty());
    EXPECT_THROW(predict(m, num::Matrix(2, fm.features() + 1)), Error);
  }
}

TEST(Classifier, SingleClassTrainingData) {
  const auto x = num::Matrix::from_rows({{0, 1}, {1, 0}, {2, 2}, {3, 1}});
  const std::vector<int> y{1, 1, 1, 1};
  for (const auto& info : kVariants) {
    const auto spec = default_spec(info.variant);
    if (info.family == Family::Tree || info.family == Family::Knn) {
      if (info.family == Family::Knn && spec.hp.knn.k > x.rows()) continue;
      const auto m = fit(spec, x, y);
      EXPECT_EQ(predict(m, x), y) << info.id;
    } else {
      try {
        fit(spec, x, y);
        ADD_FAILURE() << info.id << " accepted one class";
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DegenerateData) << info.id;
      }
    }
  }
}

TEST(Classifier, ModelInvariantsHold) {
  const auto& fm = separated_fixture();
  const auto svm = fit(default_spec(ClassifierVariant::QuadraticSvm), fm);
  for (double a : std::get<SvmModel>(svm.model).alpha) {
    EXPECT_GT(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  const auto nn = fit(default_spec(ClassifierVariant::FfbpnnLm), fm);
  for (double w : std::get<NnModel>(nn.model).parameters()) EXPECT_TRUE(std::isfinite(w));
}

TEST(Classifier, SpecEchoListsOnlyTheFamilyHyperparameters) {
  const auto j = spec_to_json(default_spec(ClassifierVariant::CubicKnn));
  EXPECT_EQ(j["variant"], "cubic_knn");
  EXPECT_EQ(j["hyperparameters"]["metric"], "minkowski3");
  EXPECT_FALSE(j["hyperparameters"].contains("C"));
}
