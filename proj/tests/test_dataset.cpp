#include <string>

#include <gtest/gtest.h>

#include "ckd/dataset.hpp"
#include "ckd/synth.hpp"

using namespace ckd;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected ckd::Error";
  return Errc::Io;
}

Schema small_schema() {
  Schema s;
  s.version = "test/1";
  s.attributes = {{"n", "count", DiscreteInteger{}},
                  {"x", "level", Numeric{}},
                  {"sg", "gravity", Nominal{{"1.005", "1.010", "1.015", "1.020", "1.025"}}},
                  {"rbc", "cells", Nominal{{"normal", "abnormal"}}},
                  {"flag", "flag", Nominal{{"yes", "no"}}}};
  s.class_attribute = "class";
  s.positive_label = "pos";
  s.negative_label = "neg";
  return s;
}

const char* kSmallHeader =
    "@relation t\n"
    "@attribute n numeric\n@attribute x numeric\n@attribute sg {1.005,1.010,1.015,1.020,1.025}\n"
    "@attribute rbc {normal,abnormal}\n@attribute flag {yes,no}\n@attribute class {pos,neg}\n@data\n";

Dataset small(const std::string& rows, SchemaOptions opts = {}) {
  return apply_schema(parse_arff(std::string(kSmallHeader) + rows), small_schema(), opts);
}

}  // namespace

TEST(ParseArff, MinimalTwoAttributeFile) {
  const auto t = parse_arff("@relation r\n@attribute a numeric\n@attribute b {yes,no}\n@data\n1,yes\n?,no\n");
  ASSERT_EQ(t.rows.size(), 2u);
  ASSERT_EQ(t.attributes.size(), 2u);
  EXPECT_EQ(t.relation, "r");
  EXPECT_EQ(t.rows[0].cells[0], std::optional<std::string>("1"));
  EXPECT_EQ(t.rows[1].cells[0], std::nullopt);
  EXPECT_EQ(t.rows[1].cells[1], std::optional<std::string>("no"));
}

TEST(ParseArff, TabsAndSpacesAreNoise) {
  const std::string head = "@relation r\n@attribute a numeric\n@attribute b numeric\n@attribute c {yes,no}\n@data\n";
  const auto clean = parse_arff(head + "48,80,yes\n");
  const auto noisy = parse_arff(head + "\t48,\t80, yes\t\n");
  EXPECT_EQ(clean.rows[0].cells, noisy.rows[0].cells);
}

TEST(ParseArff, KeywordCaseCommentsBlankLinesAndCrlf) {
  const auto t = parse_arff(
      "% leading comment\r\n\r\n@RELATION 'r x'\r\n@Attribute 'a' NUMERIC\r\n% mid\r\n@ATTRIBUTE b {Yes,No}\r\n"
      "\r\n@DATA\r\n\r\n1,YES\r\n% trailing\r\n2, No\r\n\r\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.relation, "r x");
  EXPECT_EQ(t.attributes[0].type, "numeric");
  EXPECT_EQ(t.attributes[1].nominal_values, (std::vector<std::string>{"yes", "no"}));
  EXPECT_EQ(t.rows[0].cells[1], std::optional<std::string>("yes"));
  EXPECT_EQ(t.rows[1].cells[1], std::optional<std::string>("no"));
  EXPECT_EQ(t.rows[1].line, 12u);
}

TEST(ParseArff, MissingDataSection) {
  EXPECT_EQ(code_of([] { parse_arff("@relation r\n@attribute a numeric\n"); }), Errc::MalformedHeader);
}

TEST(ParseArff, EmptyData) {
  EXPECT_EQ(code_of([] { parse_arff("@relation r\n@attribute a numeric\n@data\n\n% nothing\n"); }), Errc::EmptyData);
}

TEST(ParseArff, FieldCountMismatchReportsLine) {
  try {
    parse_arff("@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n1,2\n3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedHeader);
    EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
  }
}

TEST(ParseArff, StrayEmptyFieldsAreRepairedAndRecorded) {
  const auto t = parse_arff(
      "@relation r\n@attribute a numeric\n@attribute b {yes,no}\n@attribute c {p,n}\n@data\n"
      "1,yes,p,\n2,,no,n\n3,no,n\n");
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.repaired_lines, (std::vector<std::size_t>{6, 7}));
  EXPECT_EQ(t.rows[0].cells[2], std::optional<std::string>("p"));
  EXPECT_EQ(t.rows[1].cells[1], std::optional<std::string>("no"));
  EXPECT_EQ(t.rows[1].cells[2], std::optional<std::string>("n"));
  // Too many non-empty fields cannot be repaired.
  EXPECT_EQ(code_of([] {
              parse_arff("@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n1,2,3\n");
            }),
            Errc::MalformedHeader);
}

TEST(ParseCsv, HeaderRowAndMissingMarker) {
  const auto t = parse_csv("a,b,class\n1, yes ,pos\n?,no,neg\n\n");
  ASSERT_EQ(t.attributes.size(), 3u);
  EXPECT_EQ(t.attributes[1].name, "b");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].cells[1], std::optional<std::string>("yes"));
  EXPECT_EQ(t.rows[1].cells[0], std::nullopt);
  EXPECT_EQ(code_of([] { parse_csv("a,b\n"); }), Errc::EmptyData);
}

TEST(ApplySchema, NominalAndSpecificGravityDomains) {
  const auto ds = small("1,2.5,1.020,abnormal,yes,pos\n");
  EXPECT_EQ(ds.rows[0].cells[3], CellValue(std::string("abnormal")));
  EXPECT_EQ(ds.rows[0].cells[2], CellValue(std::string("1.020")));
  EXPECT_EQ(code_of([] { small("1,2.5,1.021,normal,yes,pos\n"); }), Errc::DomainViolation);
  // exact decimal text: 1.02 is not one of the declared tokens
  EXPECT_EQ(code_of([] { small("1,2.5,1.02,normal,yes,pos\n"); }), Errc::DomainViolation);
  EXPECT_EQ(code_of([] { small("1,2.5,1.020,weird,yes,pos\n"); }), Errc::DomainViolation);
}

TEST(ApplySchema, NominalMatchingIgnoresCaseAndWhitespace) {
  const auto a = small("1,1,1.005,normal,yes,pos\n");
  const auto b = apply_schema(parse_csv("n,x,sg,rbc,flag,class\n1,1,1.005,NORMAL,\t Yes\t,POS\n"), small_schema());
  EXPECT_EQ(a.rows, b.rows);
}

TEST(ApplySchema, LabelRules) {
  EXPECT_EQ(code_of([] { small("1,1,1.005,normal,yes,?\n"); }), Errc::LabelMissing);
  EXPECT_EQ(code_of([] { small("1,1,1.005,normal,yes,maybe\n"); }), Errc::DomainViolation);
}

TEST(ApplySchema, NumericTypes) {
  const auto ds = small("5800.0,3,1.005,normal,yes,pos\n");
  EXPECT_EQ(ds.rows[0].cells[0], CellValue(std::int64_t{5800}));
  EXPECT_EQ(ds.rows[0].cells[1], CellValue(3.0));
  EXPECT_EQ(code_of([] { small("abc,3,1.005,normal,yes,pos\n"); }), Errc::TypeMismatch);
  EXPECT_EQ(code_of([] { small("1,nan,1.005,normal,yes,pos\n"); }), Errc::TypeMismatch);
}

TEST(ApplySchema, FractionalDiscretePolicy) {
  const auto kept = small("50.1,3,1.005,normal,yes,pos\n");
  EXPECT_EQ(kept.rows[0].cells[0], CellValue(50.1));
  EXPECT_EQ(summarize(kept).fractional_discrete, 1u);
  EXPECT_EQ(code_of([] { small("50.1,3,1.005,normal,yes,pos\n", {DiscreteFractions::Reject}); }), Errc::TypeMismatch);
}

TEST(ApplySchema, ColumnCountMustMatchSchema) {
  EXPECT_EQ(code_of([] { apply_schema(parse_csv("a,class\n1,pos\n"), small_schema()); }), Errc::MalformedHeader);
}

TEST(ApplySchema, NeverCoercesOutOfDomain) {
  auto spec = separated_gaussians();
  for (auto& a : spec.attributes) a.missing_rate = 0.2;
  const auto ds = synth_generate(spec, 300, 9);
  const auto back = apply_schema(parse_arff(write_arff(ds)), ds.schema);
  for (const auto& row : back.rows) {
    for (std::size_t j = 0; j < row.cells.size(); ++j) {
      const auto& cell = row.cells[j];
      const auto& kind = back.schema.attributes[j].kind;
      if (is_missing(cell)) continue;
      if (const auto* nom = std::get_if<Nominal>(&kind)) {
        const auto& tok = std::get<std::string>(cell);
        EXPECT_NE(std::find(nom->values.begin(), nom->values.end(), tok), nom->values.end());
      } else if (std::holds_alternative<DiscreteInteger>(kind)) {
        EXPECT_TRUE(std::holds_alternative<std::int64_t>(cell));
      } else {
        EXPECT_TRUE(std::holds_alternative<double>(cell));
      }
    }
  }
}

TEST(Serialization, RoundTripIsIdentityAndIdempotent) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto spec = separated_gaussians(2.0 + static_cast<double>(seed % 4));
    for (auto& a : spec.attributes) a.missing_rate = 0.1 * static_cast<double>(seed % 5);
    const auto ds = synth_generate(spec, 10 + seed * 3, seed);
    const auto arff = write_arff(ds);
    const auto via_arff = apply_schema(parse_arff(arff), ds.schema);
    const auto via_csv = apply_schema(parse_csv(write_csv(ds)), ds.schema);
    EXPECT_EQ(via_arff, ds);
    EXPECT_EQ(via_csv, ds);
    EXPECT_EQ(write_arff(via_arff), arff);
  }
}

TEST(Summarize, EmptyDataset) {
  const Dataset empty{small_schema(), {}};
  const auto s = summarize(empty);
  EXPECT_EQ(s.rows, 0u);
  EXPECT_EQ(s.positive + s.negative, 0u);
  EXPECT_EQ(s.total_missing(), 0u);
  for (const auto& r : s.range) EXPECT_FALSE(r.has_value());
}

TEST(Summarize, CountsAreConsistent) {
  const auto ds = small("1,2,1.005,normal,yes,pos\n?,3,?,?,no,neg\n7,?,1.010,normal,?,neg\n");
  const auto s = summarize(ds);
  EXPECT_EQ(s.rows, 3u);
  EXPECT_EQ(s.positive, 1u);
  EXPECT_EQ(s.negative, 2u);
  EXPECT_EQ(s.missing, (std::vector<std::size_t>{1, 1, 1, 1, 1}));
  ASSERT_TRUE(s.range[0]);
  EXPECT_EQ(s.range[0]->min, 1.0);
  EXPECT_EQ(s.range[0]->max, 7.0);
  EXPECT_FALSE(s.range[2]);
  const auto j = summary_to_json(s);
  EXPECT_EQ(j["classes"]["pos"], 1);
  EXPECT_EQ(j["total_missing"], 5);
}

TEST(Schema, CanonicalCkdSchema) {
  const auto s = ckd_schema();
  EXPECT_NO_THROW(s.validate());
  ASSERT_EQ(s.size(), 24u);
  EXPECT_EQ(s.attributes.front().name, "age");
  EXPECT_EQ(s.attributes.back().name, "ane");
  EXPECT_EQ(s.positive_label, "ckd");
  EXPECT_EQ(schema_from_json(schema_to_json(s)), s);
}

TEST(Schema, InvariantViolations) {
  auto s = small_schema();
  s.attributes.push_back({"n", "", Numeric{}});
  EXPECT_EQ(code_of([&] { s.validate(); }), Errc::BadSpec);
  s = small_schema();
  s.attributes[2].kind = Nominal{{"a", "a"}};
  EXPECT_EQ(code_of([&] { s.validate(); }), Errc::BadSpec);
  s = small_schema();
  s.attributes[2].kind = Nominal{{}};
  EXPECT_EQ(code_of([&] { s.validate(); }), Errc::BadSpec);
  s = small_schema();
  s.negative_label = s.positive_label;
  EXPECT_EQ(code_of([&] { s.validate(); }), Errc::BadSpec);
  s = small_schema();
  s.class_attribute = "n";
  EXPECT_EQ(code_of([&] { s.validate(); }), Errc::BadSpec);
}

TEST(Synth, DeterministicForFixedSeed) {
  const auto spec = separated_gaussians();
  EXPECT_EQ(write_arff(synth_generate(spec, 100, 7)), write_arff(synth_generate(spec, 100, 7)));
  EXPECT_NE(write_arff(synth_generate(spec, 100, 7)), write_arff(synth_generate(spec, 100, 8)));
}

TEST(Synth, ClassProportionUsesFloorForPositives) {
  auto spec = separated_gaussians();
  const auto s = summarize(synth_generate(spec, 100, 1));
  EXPECT_EQ(s.positive, 50u);
  EXPECT_EQ(s.negative, 50u);
  spec.positive_fraction = 0.625;
  const auto t = summarize(synth_generate(spec, 7, 1));
  EXPECT_EQ(t.positive, 4u);  // floor(4.375)
}

TEST(Synth, BadSpec) {
  auto spec = separated_gaussians();
  spec.attributes[0].stddev[1] = -1.0;
  EXPECT_EQ(code_of([&] { synth_generate(spec, 10, 1); }), Errc::BadSpec);
  spec = separated_gaussians();
  spec.attributes[2].probabilities[0] = {0.5, 0.4};
  EXPECT_EQ(code_of([&] { synth_generate(spec, 10, 1); }), Errc::BadSpec);
  spec = separated_gaussians();
  EXPECT_EQ(code_of([&] { synth_generate(spec, 0, 1); }), Errc::BadSpec);
}

TEST(Synth, WellSeparatedGaussiansAreNearlyPerfectForNearestMean) {
  // Means +-5 with unit stddev: Bayes error ~ Phi(-5) < 1e-6.
  SynthSpec spec;
  spec.attributes.push_back({"x", Numeric{}, {5.0, -5.0}, {1.0, 1.0}, {}, 0.0});
  const auto ds = synth_generate(spec, 1000, 21);
  double mean[2] = {0, 0};
  int count[2] = {0, 0};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int c = ds.is_positive(i) ? 0 : 1;
    mean[c] += as_real(ds.rows[i].cells[0]);
    ++count[c];
  }
  mean[0] /= count[0];
  mean[1] /= count[1];
  int correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double x = as_real(ds.rows[i].cells[0]);
    const bool pos = std::abs(x - mean[0]) < std::abs(x - mean[1]);
    correct += pos == ds.is_positive(i);
  }
  EXPECT_GE(correct / 1000.0, 0.99);
}
