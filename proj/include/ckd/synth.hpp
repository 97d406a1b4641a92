#pragma once

// Seeded synthetic datasets with class-conditional Gaussian numeric columns
// and categorical nominal columns; fixtures for classifier tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ckd/dataset.hpp"
#include "ckd/rng.hpp"

namespace ckd {

struct SynthAttribute {
  std::string name;
  AttributeKind kind = Numeric{};
  // Index 0 describes the positive class, index 1 the negative class.
  std::array<double, 2> mean{};
  std::array<double, 2> stddev{1.0, 1.0};
  std::array<std::vector<double>, 2> probabilities;  // nominal only, one per allowed value
  double missing_rate = 0.0;
};

struct SynthSpec {
  std::vector<SynthAttribute> attributes;
  double positive_fraction = 0.5;
  std::string positive_label = "pos";
  std::string negative_label = "neg";

  Schema schema() const {
    Schema s;
    s.version = "synthetic/1";
    for (const auto& a : attributes) s.attributes.push_back({a.name, a.name, a.kind});
    s.class_attribute = "class";
    s.positive_label = positive_label;
    s.negative_label = negative_label;
    return s;
  }

  void validate() const {
    if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0))
      throw Error(Errc::BadSpec, "positive_fraction outside [0, 1]");
    for (const auto& a : attributes) {
      if (!(a.missing_rate >= 0.0 && a.missing_rate < 1.0))
        throw Error(Errc::BadSpec, "missing_rate outside [0, 1) for '" + a.name + "'");
      if (const auto* nom = std::get_if<Nominal>(&a.kind)) {
        for (const auto& p : a.probabilities) {
          if (p.size() != nom->values.size())
            throw Error(Errc::BadSpec, "probability count mismatch for '" + a.name + "'");
          double sum = 0.0;
          for (double q : p) {
            if (q < 0.0) throw Error(Errc::BadSpec, "negative probability for '" + a.name + "'");
            sum += q;
          }
          if (std::abs(sum - 1.0) > 1e-9) throw Error(Errc::BadSpec, "probabilities for '" + a.name + "' do not sum to 1");
        }
      } else {
        for (double s : a.stddev)
          if (!(s >= 0.0)) throw Error(Errc::BadSpec, "negative stddev for '" + a.name + "'");
      }
    }
    schema().validate();
  }
};

/// n rows, floor(n * positive_fraction) of them positive, in seeded random
/// order. Identical (spec, n, seed) always produce an identical Dataset.
inline Dataset synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::BadSpec, "n must be at least 1");
  spec.validate();
  Rng rng(seed);
  const auto n_pos = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.positive_fraction));
  std::vector<int> cls(n, 1);
  std::fill(cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(n_pos), 0);
  rng.shuffle(std::span<int>(cls));

  Dataset ds{spec.schema(), {}};
  ds.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cls[i];
    Row row;
    row.label = c == 0 ? spec.positive_label : spec.negative_label;
    for (const auto& a : spec.attributes) {
      // Draw the value first so the stream does not depend on missingness.
      CellValue v;
      if (const auto* nom = std::get_if<Nominal>(&a.kind)) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t pick = nom->values.size() - 1;
        for (std::size_t k = 0; k < nom->values.size(); ++k) {
          acc += a.probabilities[c][k];
          if (u < acc) {
            pick = k;
            break;
          }
        }
        v = nom->values[pick];
      } else {
        const double x = rng.normal(a.mean[c], a.stddev[c]);
        if (std::holds_alternative<DiscreteInteger>(a.kind)) v = static_cast<std::int64_t>(std::llround(x));
        else v = x;
      }
      const double m = rng.uniform01();
      row.cells.push_back(m < a.missing_rate ? CellValue{Missing{}} : std::move(v));
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

/// Two numeric columns with class means +-separation/2 (unit stddev) and one
/// weakly informative yes/no column.
inline SynthSpec separated_gaussians(double separation = 10.0) {
  SynthSpec s;
  const double h = separation / 2.0;
  s.attributes.push_back({"x1", Numeric{}, {h, -h}, {1.0, 1.0}, {}, 0.0});
  s.attributes.push_back({"x2", DiscreteInteger{}, {h, -h}, {1.0, 1.0}, {}, 0.0});
  SynthAttribute flag{"flag", Nominal{{"yes", "no"}}, {}, {}, {}, 0.0};
  flag.probabilities = {std::vector<double>{0.7, 0.3}, std::vector<double>{0.3, 0.7}};
  s.attributes.push_back(flag);
  return s;
}

}  // namespace ckd
