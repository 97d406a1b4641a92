#pragma once

#include <string>
#include <vector>

#include "ckd/numkernel.hpp"
#include "ckd/rng.hpp"
#include "oracles/naive.hpp"

namespace testing_support {

inline std::string data_path(const std::string& name) { return std::string(CKD_DATA_DIR) + "/" + name; }

inline std::string ckd_file() { return data_path("chronic_kidney_disease.arff"); }

inline ckd::num::Matrix random_matrix(std::size_t r, std::size_t c, ckd::Rng& rng, double lo = -1.0,
                                      double hi = 1.0) {
  ckd::num::Matrix m(r, c);
  for (auto& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

/// M^T M + shift I.
inline ckd::num::Matrix random_spd(std::size_t n, ckd::Rng& rng, double shift = 1.0) {
  auto m = random_matrix(n, n, rng);
  auto a = ckd::num::multiply(ckd::num::transpose(m), m);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
  return a;
}

inline oracle::Dense to_dense(const ckd::num::Matrix& m) {
  oracle::Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

}  // namespace testing_support
