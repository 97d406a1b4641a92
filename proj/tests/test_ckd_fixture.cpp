// Checks against the shipped UCI chronic kidney disease file. Expected values
// were produced by tests/oracles/ckd_oracle.py (a plain line scanner) before
// the C++ parser existed, and are frozen here.

#include <map>

#include <gtest/gtest.h>

#include "ckd/dataset.hpp"
#include "ckd/preprocess.hpp"
#include "oracles/ckd_counts.hpp"
#include "test_support.hpp"

using namespace ckd;

namespace {

const Dataset& ckd_data() {
  static const Dataset ds = load_dataset(testing_support::ckd_file(), DataFormat::Arff);
  return ds;
}

}  // namespace

TEST(CkdFile, RawShape) {
  const auto raw = parse_arff(text::read_file(testing_support::ckd_file()));
  EXPECT_EQ(raw.rows.size(), 400u);
  EXPECT_EQ(raw.attributes.size(), 25u);
  EXPECT_EQ(raw.relation, "Chronic_Kidney_Disease");
  // two trailing commas and one doubled comma in the distributed file
  EXPECT_EQ(raw.repaired_lines.size(), 3u);
}

TEST(CkdFile, SummaryMatchesLineScanOracle) {
  const auto s = summarize(ckd_data());
  EXPECT_EQ(s.rows, 400u);
  EXPECT_EQ(s.attributes.size(), 24u);
  EXPECT_EQ(s.positive, 250u);
  EXPECT_EQ(s.negative, 150u);
  for (std::size_t j = 0; j < s.attributes.size(); ++j)
    EXPECT_EQ(s.missing[j], oracle::kCkdMissing.at(s.attributes[j])) << s.attributes[j];
  EXPECT_EQ(s.total_missing(), 1012u);
}

TEST(CkdFile, ObservedRanges) {
  const auto s = summarize(ckd_data());
  std::map<std::string, ValueRange> expected = {{"age", {2, 90}},     {"bp", {50, 180}},     {"bgr", {22, 490}},
                                                {"bu", {1.5, 391}},   {"sc", {0.4, 76}},     {"sod", {4.5, 163}},
                                                {"pot", {2.5, 47}},   {"hemo", {3.1, 17.8}}, {"pcv", {9, 54}},
                                                {"wbcc", {2200, 26400}}, {"rbcc", {2.1, 8}}};
  for (std::size_t j = 0; j < s.attributes.size(); ++j) {
    const auto it = expected.find(s.attributes[j]);
    if (it == expected.end()) {
      EXPECT_FALSE(s.range[j]);
      continue;
    }
    ASSERT_TRUE(s.range[j]);
    EXPECT_EQ(s.range[j]->min, it->second.min) << it->first;
    EXPECT_EQ(s.range[j]->max, it->second.max) << it->first;
  }
  // 50.1, 1.5, 98.6 (blood urea) and 4.5 (sodium)
  EXPECT_EQ(s.fractional_discrete, 4u);
}

TEST(CkdFile, StrictDiscretePolicyRejectsTheFile) {
  EXPECT_THROW(load_dataset(testing_support::ckd_file(), DataFormat::Arff, ckd_schema(), {DiscreteFractions::Reject}),
               Error);
}

TEST(CkdFile, RoundTripThroughArffAndCsv) {
  const auto& ds = ckd_data();
  EXPECT_EQ(apply_schema(parse_arff(write_arff(ds)), ds.schema), ds);
  EXPECT_EQ(apply_schema(parse_csv(write_csv(ds)), ds.schema), ds);
}

TEST(CkdFile, ClassConditionalFillsMatchOracle) {
  const auto plan = build_imputation_plan(ckd_data(), ImputationScope::WholeDataset);
  auto idx = [&](const std::string& n) {
    return static_cast<std::size_t>(std::find(plan.attributes.begin(), plan.attributes.end(), n) -
                                    plan.attributes.begin());
  };
  const std::map<std::string, std::pair<double, double>> means = {
      {"age", {54.541322314049587, 46.516778523489933}}, {"bp", {79.625, 71.351351351351354}},
      {"bgr", {175.41981132075472, 107.72222222222223}}, {"bu", {72.389029535864978, 32.798611111111114}},
      {"sc", {4.4149159663865518, 0.86896551724137927}}, {"sod", {133.90178571428572, 141.73103448275862}},
      {"pot", {4.8784431137724544, 4.3379310344827582}}, {"hemo", {10.64754901960784, 15.188194444444443}},
      {"pcv", {32.939890710382514, 46.335616438356162}}, {"wbcc", {9069.5364238410602, 7705.5944055944055}},
      {"rbcc", {3.9452380952380937, 5.3790209790209769}}};
  for (const auto& [name, m] : means) {
    const auto j = idx(name);
    EXPECT_NEAR(std::get<double>(plan.by_class[j][0]), m.first, 1e-9) << name;
    EXPECT_NEAR(std::get<double>(plan.by_class[j][1]), m.second, 1e-9) << name;
  }
  const std::map<std::string, std::pair<std::string, std::string>> modes = {
      {"sg", {"1.010", "1.020"}},         {"al", {"0", "0"}},
      {"su", {"0", "0"}},                 {"rbc", {"normal", "normal"}},
      {"pc", {"normal", "normal"}},       {"pcc", {"notpresent", "notpresent"}},
      {"ba", {"notpresent", "notpresent"}}, {"htn", {"yes", "no"}},
      {"dm", {"yes", "no"}},              {"cad", {"no", "no"}},
      {"appet", {"good", "good"}},        {"pe", {"no", "no"}},
      {"ane", {"no", "no"}}};
  for (const auto& [name, m] : modes) {
    const auto j = idx(name);
    EXPECT_EQ(std::get<std::string>(plan.by_class[j][0]), m.first) << name;
    EXPECT_EQ(std::get<std::string>(plan.by_class[j][1]), m.second) << name;
  }
}

TEST(CkdFile, ImputedDatasetHasNoMissingCells) {
  const auto& ds = ckd_data();
  const auto filled = impute(ds, build_imputation_plan(ds, ImputationScope::WholeDataset));
  const auto s = summarize(filled);
  EXPECT_EQ(s.total_missing(), 0u);
  EXPECT_EQ(s.rows, 400u);
  // only the 1012 oracle-counted missing cells changed
  std::size_t changed = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < ds.schema.size(); ++j) changed += !(ds.rows[i].cells[j] == filled.rows[i].cells[j]);
  EXPECT_EQ(changed, 1012u);
}

TEST(CkdFile, EncodedWidthMatchesHandCount) {
  // 11 numeric/discrete columns; nominal: sg 5, al 6, su 6, and ten binary
  // attributes (rbc pc pcc ba htn dm cad appet pe ane) at 2 each: 11 + 17 + 20 = 48.
  const auto& ds = ckd_data();
  const auto fm = encode(impute(ds, build_imputation_plan(ds, ImputationScope::WholeDataset)));
  EXPECT_EQ(fm.features(), 48u);
  EXPECT_EQ(fm.rows(), 400u);
  std::size_t pos = 0;
  for (int y : fm.y) pos += y == 1;
  EXPECT_EQ(pos, 250u);
}
