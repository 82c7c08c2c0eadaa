#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/matrix.hpp"

namespace sdc {

inline constexpr double kSingularPivot = 1e-12;

/// LU factorization with partial (row) pivoting of a square matrix.
///
/// Factoring fails with SingularMatrix when a pivot magnitude drops below
/// kSingularPivot times the largest entry magnitude of the input.
class LuFactor {
 public:
  explicit LuFactor(const Mat& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
    if (a.rows() != a.cols()) throw DimensionMismatch("LU: matrix must be square");
    const double scale = a.max_abs();
    const double tiny = kSingularPivot * scale;
    if (scale == 0.0) throw SingularMatrix("LU: zero matrix");
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n_; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      if (std::abs(lu_(p, k)) < tiny) throw SingularMatrix("LU: pivot below threshold at step " + std::to_string(k));
      if (p != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
      }
      const double piv = lu_(k, k);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double m = lu_(i, k) / piv;
        lu_(i, k) = m;
        if (m == 0.0) continue;
        for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= m * lu_(k, j);
      }
    }
  }

  std::size_t size() const noexcept { return n_; }

  Vec solve(std::span<const double> y) const {
    if (y.size() != n_) throw DimensionMismatch("LU solve: rhs length mismatch");
    Vec x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = y[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

  // ||A^{-1}||_1 computed column by column. O(n^3); only meant for the small
  // K x K systems of the zero-forcing scheme.
  double inverse_norm1() const {
    double best = 0.0;
    Vec e(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      best = std::max(best, norm1(solve(e)));
    }
    return best;
  }

 private:
  std::size_t n_;
  Mat lu_;
  std::vector<std::size_t> perm_;
};

inline double matrix_norm1(const Mat& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// 1-norm condition number ||A||_1 ||A^{-1}||_1.
inline double condition_number1(const Mat& a) {
  const LuFactor lu(a);
  return matrix_norm1(a) * lu.inverse_norm1();
}

inline Vec solve_square(const Mat& a, std::span<const double> y) {
  if (a.rows() != a.cols()) throw DimensionMismatch("solve_square: matrix must be square");
  if (y.size() != a.rows()) throw DimensionMismatch("solve_square: rhs length mismatch");
  return LuFactor(a).solve(y);
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

struct LeastSquaresResult {
  Vec x;
  double residual = 0.0;  // ||A x - y||_2, evaluated directly
  std::size_t rank = 0;
};

/// min ||A x - y||_2 via Householder QR with column pivoting.
///
/// Rank-deficient and underdetermined systems get a basic solution: columns
/// beyond the numerical rank receive zero coefficients.
inline LeastSquaresResult least_squares(const Mat& a, std::span<const double> y) {
  const std::size_t m = a.rows(), n = a.cols();
  if (y.size() != m) throw DimensionMismatch("least_squares: rhs length mismatch");

  Mat r = a;
  Vec qty(y.begin(), y.end());
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < n; ++j) perm[j] = j;
  Vec colnorm2(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) colnorm2[j] += r(i, j) * r(i, j);

  const std::size_t steps = std::min(m, n);
  Vec v(m);
  double r00 = 0.0;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    // Pivot: remaining column with the largest trailing norm (recomputed, the
    // matrices here are small enough that downdating is not worth the drift).
    std::size_t p = k;
    double best = -1.0;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += r(i, j) * r(i, j);
      colnorm2[j] = s;
      if (s > best) {
        best = s;
        p = j;
      }
    }
    if (p != k) {
      for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, p));
      std::swap(perm[k], perm[p]);
    }
    const double alpha_abs = std::sqrt(best);
    if (k == 0) r00 = alpha_abs;
    if (alpha_abs <= 1e-13 * static_cast<double>(std::max(m, n)) * r00 || alpha_abs == 0.0) break;

    const double alpha = r(k, k) > 0 ? -alpha_abs : alpha_abs;
    for (std::size_t i = k; i < m; ++i) v[i] = r(i, k);
    v[k] -= alpha;
    const double vnorm2 = [&] {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i] * v[i];
      return s;
    }();
    if (vnorm2 > 0.0) {
      for (std::size_t j = k; j < n; ++j) {
        double d = 0.0;
        for (std::size_t i = k; i < m; ++i) d += v[i] * r(i, j);
        const double f = 2.0 * d / vnorm2;
        for (std::size_t i = k; i < m; ++i) r(i, j) -= f * v[i];
      }
      double d = 0.0;
      for (std::size_t i = k; i < m; ++i) d += v[i] * qty[i];
      const double f = 2.0 * d / vnorm2;
      for (std::size_t i = k; i < m; ++i) qty[i] -= f * v[i];
    }
    r(k, k) = alpha;
    for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
    ++rank;
  }

  Vec xp(n, 0.0);
  for (std::size_t i = rank; i-- > 0;) {
    double s = qty[i];
    for (std::size_t j = i + 1; j < rank; ++j) s -= r(i, j) * xp[j];
    xp[i] = s / r(i, i);
  }
  LeastSquaresResult out;
  out.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) out.x[perm[j]] = xp[j];
  out.residual = norm2(subtract(matvec(a, out.x), y));
  out.rank = rank;
  return out;
}

// ---------------------------------------------------------------------------
// Cholesky (used for D D^T in basis pursuit)
// ---------------------------------------------------------------------------

class Cholesky {
 public:
  explicit Cholesky(const Mat& spd) : n_(spd.rows()), l_(spd.rows(), spd.rows()) {
    if (spd.rows() != spd.cols()) throw DimensionMismatch("Cholesky: matrix must be square");
    double maxdiag = 0.0;
    for (std::size_t i = 0; i < n_; ++i) maxdiag = std::max(maxdiag, spd(i, i));
    for (std::size_t j = 0; j < n_; ++j) {
      double d = spd(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > kSingularPivot * maxdiag)) throw RankDeficient("Cholesky: matrix is not numerically positive definite");
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = spd(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / ljj;
      }
    }
  }

  Vec solve(std::span<const double> b) const {
    Vec x(b.begin(), b.end());
    for (std::size_t i = 0; i < n_; ++i) {
      double s = x[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
      x[i] = s / l_(i, i);
    }
    for (std::size_t i = n_; i-- > 0;) {
      double s = x[i];
      for (std::size_t k = i + 1; k < n_; ++k) s -= l_(k, i) * x[k];
      x[i] = s / l_(i, i);
    }
    return x;
  }

 private:
  std::size_t n_;
  Mat l_;
};

// ---------------------------------------------------------------------------
// Spectral quantities
// ---------------------------------------------------------------------------

struct SpectralNorm {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on A^T A.
///
/// The start vector is fixed (a seeded Gaussian draw) so results are
/// reproducible and a structured start cannot be orthogonal to the dominant
/// singular vector. Stops when the Rayleigh quotient changes by at most
/// tol (relative); after max_iter the best estimate is returned with
/// converged = false.
inline SpectralNorm spectral_norm(const Mat& a, double tol = 1e-12, int max_iter = 10000) {
  if (!(tol > 0.0)) throw InvalidArgument("spectral_norm: tol must be positive");
  const std::size_t n = a.cols();
  Rng rng(RngSeed{0x5eed5eedULL});
  Vec v(n);
  for (double& x : v) x = rng.normal();
  double nv = norm2(v);
  for (double& x : v) x /= nv;

  SpectralNorm out;
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec av = matvec(a, v);
    const double lam_new = [&] {
      double s = 0.0;
      for (double x : av) s += x * x;
      return s;
    }();
    Vec w = matvec_transposed(a, av);
    const double nw = norm2(w);
    out.iterations = it;
    if (nw == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    const bool done = it > 1 && std::abs(lam_new - lambda) <= tol * lam_new;
    lambda = std::max(lambda, lam_new);
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.value = std::sqrt(lambda);
  return out;
}

/// Eigenvalues of a symmetric matrix (lower triangle is ignored), ascending.
///
/// Sizes 1-3 use closed forms (quadratic formula, trigonometric cubic);
/// larger sizes use cyclic Jacobi rotations.
inline Vec symmetric_eigenvalues(const Mat& s) {
  const std::size_t n = s.rows();
  if (n != s.cols()) throw DimensionMismatch("symmetric_eigenvalues: matrix must be square");
  if (n == 1) return {s(0, 0)};
  if (n == 2) {
    const double m = 0.5 * (s(0, 0) + s(1, 1));
    const double h = 0.5 * (s(0, 0) - s(1, 1));
    const double r = std::hypot(h, s(0, 1));
    return {m - r, m + r};
  }
  if (n == 3) {
    const double a00 = s(0, 0), a11 = s(1, 1), a22 = s(2, 2);
    const double a01 = s(0, 1), a02 = s(0, 2), a12 = s(1, 2);
    const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    Vec ev;
    if (p1 == 0.0) {
      ev = {a00, a11, a22};
    } else {
      const double q = (a00 + a11 + a22) / 3.0;
      const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
      const double p = std::sqrt((b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1) / 6.0);
      const double det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) +
                         a02 * (a01 * a12 - b11 * a02);
      const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
      const double phi = std::acos(r) / 3.0;
      const double hi = q + 2.0 * p * std::cos(phi);
      const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
      ev = {lo, 3.0 * q - hi - lo, hi};
    }
    std::sort(ev.begin(), ev.end());
    return ev;
  }

  Mat a = s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= 1e-30 * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Gram matrix A^T A.
inline Mat gram(const Mat& a) {
  Mat g(a.cols(), a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  return g;
}

}  // namespace sdc
