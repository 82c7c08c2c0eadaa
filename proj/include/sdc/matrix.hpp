#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/random.hpp"

namespace sdc {

using Vec = std::vector<double>;
using IndexSet = std::vector<std::size_t>;

inline constexpr double kDefaultEpsZero = 1e-8;

/// Dense real matrix, row-major storage.
///
/// Dimensions are always positive and every entry is finite at construction;
/// the constructor taking raw data enforces both. Element access through
/// operator() is unchecked.
class Mat {
 public:
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    check_dims();
  }

  Mat(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_dims();
    if (data_.size() != rows_ * cols_)
      throw DimensionMismatch("Mat: " + std::to_string(data_.size()) + " entries for a " +
                              std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
    for (double v : data_)
      if (!std::isfinite(v)) throw InvalidArgument("Mat: non-finite entry");
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vec column(std::size_t j) const {
    Vec c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const double> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  Mat select_columns(std::span<const std::size_t> idx) const {
    Mat out(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < idx.size(); ++k) out(i, k) = (*this)(i, idx[k]);
    return out;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat scaled(double s) const {
    Mat out = *this;
    for (double& v : out.data_) v *= s;
    return out;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  void check_dims() const {
    if (rows_ == 0 || cols_ == 0) throw InvalidArgument("Mat: dimensions must be positive");
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Random ensembles
// ---------------------------------------------------------------------------

/// i.i.d. standard normal entries (polar method, see Rng), filled row-major.
inline Mat gaussian_matrix(std::size_t rows, std::size_t cols, RngSeed seed) {
  Rng rng(seed);
  Mat m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

/// i.i.d. equiprobable +-1 entries.
inline Mat rademacher_matrix(std::size_t rows, std::size_t cols, RngSeed seed) {
  Rng rng(seed);
  Mat m(rows, cols);
  for (double& v : m.data()) v = rng.sign();
  return m;
}

// ---------------------------------------------------------------------------
// Products and reshaping
// ---------------------------------------------------------------------------

inline Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vec matvec(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size())
    throw DimensionMismatch("matvec: matrix has " + std::to_string(a.cols()) +
                            " columns, vector has " + std::to_string(x.size()) + " entries");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// A^T x without forming the transpose.
inline Vec matvec_transposed(const Mat& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw DimensionMismatch("matvec_transposed: size mismatch");
  Vec y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  return y;
}

/// Row-stacking vectorization: rows of A concatenated in order. With this
/// convention vec_row(A B) == kron(A, I) vec_row(B).
inline Vec vec_row(const Mat& a) { return Vec(a.data().begin(), a.data().end()); }

inline Mat kron(const Mat& a, const Mat& b) {
  Mat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

// ---------------------------------------------------------------------------
// Norms and supports
// ---------------------------------------------------------------------------

// Absolute cutoff below which an entry counts as zero: eps_zero scaled by the
// largest magnitude in the containing matrix, with a floor of 1.
inline double zero_cutoff(double eps_zero, double max_abs) noexcept {
  return eps_zero * std::max(1.0, max_abs);
}

inline std::size_t norm0(const Mat& a, double eps_zero = kDefaultEpsZero) {
  const double cut = zero_cutoff(eps_zero, a.max_abs());
  return static_cast<std::size_t>(
      std::count_if(a.data().begin(), a.data().end(), [cut](double v) { return std::abs(v) > cut; }));
}

inline double norm1(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double norm2(std::span<const double> v) noexcept {
  // Scaled accumulation keeps large/small inputs from over/underflowing.
  double scale = 0.0, ssq = 1.0;
  for (double x : v) {
    if (x == 0.0) continue;
    const double ax = std::abs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

inline double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Support of a vector with the cutoff computed by the caller.
inline IndexSet support_with_cutoff(std::span<const double> v, double cut) {
  IndexSet s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > cut) s.push_back(i);
  return s;
}

// Support of each row of A, threshold relative to the whole matrix.
inline std::vector<IndexSet> row_supports(const Mat& a, double eps_zero) {
  const double cut = zero_cutoff(eps_zero, a.max_abs());
  std::vector<IndexSet> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = support_with_cutoff(a.row(i), cut);
  return out;
}

inline std::vector<IndexSet> column_supports(const Mat& a, double eps_zero) {
  const double cut = zero_cutoff(eps_zero, a.max_abs());
  std::vector<IndexSet> out(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) out[j] = support_with_cutoff(a.column(j), cut);
  return out;
}

inline Vec subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("subtract: size mismatch");
  Vec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

namespace detail {

// Advance a sorted k-combination of [0, n) to its lexicographic successor.
inline bool next_combination(IndexSet& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

}  // namespace sdc
