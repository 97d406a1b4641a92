#pragma once

// Small dense linear algebra: row-major matrices, Cholesky-based SPD solves,
// log-determinants and sample mean/covariance. Everything is 64-bit floating
// point. Only the symmetric positive-definite path is offered.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "ckd/error.hpp"

namespace ckd::num {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw Error(Errc::DimensionMismatch, "ragged matrix literal");
      std::copy(row.begin(), row.end(), m.row(i++).begin());
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// Appends one row; the first row fixes the column count.
  void push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw Error(Errc::DimensionMismatch, "row width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  /// Rows selected by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      auto src = row(indices[k]);
      std::copy(src.begin(), src.end(), out.row(k).begin());
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::DimensionMismatch, "multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

inline Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(Errc::DimensionMismatch, "matvec: size mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

/// A^T x.
inline Vector matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw Error(Errc::DimensionMismatch, "matvec_transposed: size mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    auto ai = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += ai[j] * xi;
  }
  return y;
}

/// A^T A, accumulated one row at a time into the lower triangle and mirrored.
inline Matrix gram(const Matrix& a) {
  const std::size_t p = a.cols();
  Matrix g(p, p);
  for (std::size_t n = 0; n < a.rows(); ++n) {
    auto r = a.row(n);
    for (std::size_t i = 0; i < p; ++i) {
      const double ri = r[i];
      if (ri == 0.0) continue;
      auto gi = g.row(i);
      for (std::size_t j = 0; j <= i; ++j) gi[j] += ri * r[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) g(i, j) = g(j, i);
  return g;
}

/// Lower-triangular L with L L^T = A + ridge I. Only the lower triangle of A
/// is read. Throws NotPositiveDefinite when a pivot is not strictly positive.
inline Matrix cholesky(const Matrix& a, double ridge = 0.0) {
  if (a.rows() != a.cols()) throw Error(Errc::DimensionMismatch, "cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto li = l.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      auto lj = l.row(j);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      if (i == j) {
        s += ridge;
        if (!(s > 0.0) || !std::isfinite(s))
          throw Error(Errc::NotPositiveDefinite,
                      "pivot " + std::to_string(s) + " at index " + std::to_string(i));
        li[i] = std::sqrt(s);
      } else {
        li[j] = s / lj[j];
      }
    }
  }
  return l;
}

/// Solves L y = b.
inline Vector forward_substitute(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  if (b.size() != n) throw Error(Errc::DimensionMismatch, "forward_substitute: size mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto li = l.row(i);
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * y[k];
    y[i] = s / li[i];
  }
  return y;
}

/// Solves L^T x = y.
inline Vector backward_substitute_transposed(const Matrix& l, std::span<const double> y) {
  const std::size_t n = l.rows();
  if (y.size() != n) throw Error(Errc::DimensionMismatch, "backward_substitute: size mismatch");
  Vector x(y.begin(), y.end());
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= l(i, i);
    const double xi = x[i];
    auto li = l.row(i);
    for (std::size_t k = 0; k < i; ++k) x[k] -= li[k] * xi;
  }
  return x;
}

inline Vector cholesky_solve(const Matrix& l, std::span<const double> b) {
  return backward_substitute_transposed(l, forward_substitute(l, b));
}

/// Solves (A + ridge I) x = b.
inline Vector solve_spd(const Matrix& a, std::span<const double> b, double ridge = 0.0) {
  if (a.rows() != b.size()) throw Error(Errc::DimensionMismatch, "solve_spd: size mismatch");
  return cholesky_solve(cholesky(a, ridge), b);
}

inline double log_det_from_cholesky(const Matrix& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

/// log det(A + ridge I).
inline double log_det_spd(const Matrix& a, double ridge = 0.0) {
  return log_det_from_cholesky(cholesky(a, ridge));
}

struct MeanCovariance {
  Vector mean;
  Matrix cov;
};

/// Sample mean and unbiased (1/(n-1)) covariance of the rows of X.
inline MeanCovariance mean_and_covariance(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw Error(Errc::TooFewSamples, "covariance needs at least 2 samples, got " + std::to_string(n));
  MeanCovariance out{Vector(d, 0.0), Matrix(d, d)};
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += r[j];
  }
  for (double& m : out.mean) m /= static_cast<double>(n);
  Vector centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) centered[j] = r[j] - out.mean[j];
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = centered[a];
      auto ca_row = out.cov.row(a);
      for (std::size_t b = 0; b <= a; ++b) ca_row[b] += ca * centered[b];
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      out.cov(a, b) *= scale;
      out.cov(b, a) = out.cov(a, b);
    }
  }
  return out;
}

inline double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

}  // namespace ckd::num
