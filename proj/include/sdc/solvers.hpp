#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/linalg.hpp"
#include "sdc/matrix.hpp"
#include "sdc/random.hpp"

namespace sdc {

struct SolverConfig {
  double eps_zero = kDefaultEpsZero;
  double feas_tol = 1e-9;
  double bp_rho = 1.0;
  int bp_max_iter = 50000;
  double bp_tol_abs = 1e-10;
  double bp_tol_rel = 1e-8;
  std::optional<std::size_t> l0_max_support;

  void validate() const {
    if (!(eps_zero > 0 && feas_tol > 0 && bp_rho > 0 && bp_tol_abs > 0 && bp_tol_rel > 0 && bp_max_iter > 0))
      throw InvalidArgument("SolverConfig: tolerances and iteration limits must be positive");
  }
};

enum class Method { zero_forcing, l0, basis_pursuit };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::zero_forcing: return "zf";
    case Method::l0: return "l0";
    case Method::basis_pursuit: return "bp";
  }
  return "?";
}

struct ColumnDiagnostics {
  int iterations = 0;      // ADMM iterations, or subsets tested by the l0 oracle
  double residual = 0.0;   // ||D e_l - f_l||_2 of the final column
  int resamples = 0;       // zero-forcing redraws
  bool converged = true;
  IndexSet subset;         // zero-forcing: the K servers used
};

struct Diagnostics {
  Method method = Method::zero_forcing;
  double eps_zero = kDefaultEpsZero;
  double feas_tol = 1e-9;
  double max_abs_residual = 0.0;  // max |D E - F|
  std::vector<ColumnDiagnostics> columns;

  bool all_converged() const {
    return std::all_of(columns.begin(), columns.end(), [](const auto& c) { return c.converged; });
  }
};

/// Encoding matrix produced by one of the schemes, with its cost and the
/// per-server computation assignments (row supports of E).
struct SchemeOutcome {
  Mat E;
  double gamma = 0.0;
  std::vector<IndexSet> server_supports;
  Diagnostics diagnostics;

  // max|DE - F| <= feas_tol (1 + max|F|)
  bool feasible(const Mat& d, const Mat& f) const {
    return max_abs_diff(matmul(d, E), f) <= diagnostics.feas_tol * (1.0 + f.max_abs());
  }
};

/// Normalized computation cost ||E||_0 / (N L).
inline double gamma_of(const Mat& e, double eps_zero = kDefaultEpsZero) {
  return static_cast<double>(norm0(e, eps_zero)) / static_cast<double>(e.rows() * e.cols());
}

namespace detail {

inline void check_shapes(const Mat& d, const Mat& f) {
  if (d.rows() != f.rows())
    throw DimensionMismatch("D has " + std::to_string(d.rows()) + " rows but F has " + std::to_string(f.rows()));
}

inline SchemeOutcome finish(const Mat& d, const Mat& f, Mat e, Diagnostics diag) {
  SchemeOutcome out{std::move(e), 0.0, {}, std::move(diag)};
  out.gamma = gamma_of(out.E, out.diagnostics.eps_zero);
  out.server_supports = row_supports(out.E, out.diagnostics.eps_zero);
  out.diagnostics.max_abs_residual = max_abs_diff(matmul(d, out.E), f);
  return out;
}

inline double column_residual(const Mat& d, std::span<const double> x, std::span<const double> y) {
  return norm2(subtract(matvec(d, x), y));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Zero-forcing
// ---------------------------------------------------------------------------

inline constexpr int kZeroForcingAttempts = 32;
inline constexpr double kZeroForcingMaxCondition = 1e12;

/// Zero-forcing scheme: every column of E is supported on a uniformly random
/// K-subset of servers, on which D restricted to those columns is inverted.
/// Each column therefore has at most K nonzeros and gamma <= K/N.
///
/// Column l draws its subset from derive_seed(seed, l). Singular or badly
/// conditioned (1-norm condition > 1e12) subsets are redrawn, at most 32 times.
inline SchemeOutcome zero_forcing_scheme(const Mat& d, const Mat& f, RngSeed seed, const SolverConfig& cfg = {}) {
  cfg.validate();
  detail::check_shapes(d, f);
  const std::size_t k = d.rows(), n = d.cols(), l = f.cols();
  if (k > n) throw InvalidArgument("zero_forcing_scheme: requires K <= N");

  Mat e(n, l);
  Diagnostics diag{Method::zero_forcing, cfg.eps_zero, cfg.feas_tol, 0.0, std::vector<ColumnDiagnostics>(l)};
  for (std::size_t col = 0; col < l; ++col) {
    Rng rng(derive_seed(seed, col));
    const Vec y = f.column(col);
    auto& cd = diag.columns[col];
    bool solved = false;
    for (int attempt = 0; attempt < kZeroForcingAttempts && !solved; ++attempt) {
      IndexSet subset = rng.subset(n, k);
      const Mat sub = d.select_columns(subset);
      try {
        const LuFactor lu(sub);
        if (matrix_norm1(sub) * lu.inverse_norm1() > kZeroForcingMaxCondition) {
          ++cd.resamples;
          continue;
        }
        const Vec x = lu.solve(y);
        for (std::size_t i = 0; i < k; ++i) e(subset[i], col) = x[i];
        cd.subset = std::move(subset);
        cd.residual = detail::column_residual(d, e.column(col), y);
        solved = true;
      } catch (const SingularMatrix&) {
        ++cd.resamples;
      }
    }
    if (!solved) throw ResampleExhausted(col, kZeroForcingAttempts);
  }
  return detail::finish(d, f, std::move(e), std::move(diag));
}

// ---------------------------------------------------------------------------
// Exhaustive l0 oracle
// ---------------------------------------------------------------------------

inline constexpr std::size_t kL0MaxColumns = 24;

struct L0Column {
  IndexSet support;
  Vec coeffs;              // aligned with support
  double residual = 0.0;
  int subsets_tested = 0;
};

/// Sparsest z with D z = y (to feas_tol), by exhaustive search over supports
/// of increasing size. Within a size the lexicographically first feasible
/// support is returned.
inline L0Column l0_column_oracle(const Mat& d, std::span<const double> y, const SolverConfig& cfg = {},
                                 std::size_t column_index = 0) {
  cfg.validate();
  if (y.size() != d.rows()) throw DimensionMismatch("l0_column_oracle: rhs length mismatch");
  const std::size_t n = d.cols();
  if (n > kL0MaxColumns && !cfg.l0_max_support)
    throw TooLarge("l0_column_oracle: N = " + std::to_string(n) + " exceeds the exhaustive limit of 24; set l0_max_support");
  const std::size_t smax = std::min(n, cfg.l0_max_support.value_or(n));
  const double ynorm = norm2(y);
  const double tol = cfg.feas_tol * (1.0 + ynorm);

  L0Column out;
  if (ynorm <= tol) {
    out.residual = ynorm;
    return out;
  }
  for (std::size_t s = 1; s <= smax; ++s) {
    IndexSet c(s);
    for (std::size_t i = 0; i < s; ++i) c[i] = i;
    do {
      ++out.subsets_tested;
      const auto ls = least_squares(d.select_columns(c), y);
      if (ls.residual <= tol) {
        out.support = c;
        out.coeffs = ls.x;
        out.residual = ls.residual;
        return out;
      }
    } while (detail::next_combination(c, n));
  }
  throw Infeasible(column_index, "no support of size <= " + std::to_string(smax) + " reproduces the column");
}

/// l0-minimal encoding matrix, one exhaustive search per column of F.
inline SchemeOutcome l0_min_encode(const Mat& d, const Mat& f, const SolverConfig& cfg = {}) {
  cfg.validate();
  detail::check_shapes(d, f);
  const std::size_t n = d.cols(), l = f.cols();
  Mat e(n, l);
  Diagnostics diag{Method::l0, cfg.eps_zero, cfg.feas_tol, 0.0, std::vector<ColumnDiagnostics>(l)};
  for (std::size_t col = 0; col < l; ++col) {
    const auto r = l0_column_oracle(d, f.column(col), cfg, col);
    for (std::size_t i = 0; i < r.support.size(); ++i) e(r.support[i], col) = r.coeffs[i];
    diag.columns[col].iterations = r.subsets_tested;
    diag.columns[col].residual = r.residual;
  }
  return detail::finish(d, f, std::move(e), std::move(diag));
}

// ---------------------------------------------------------------------------
// Basis pursuit
// ---------------------------------------------------------------------------

struct BasisPursuitColumn {
  Vec z;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  bool debiased = false;  // false: fell back to the exact projection of the iterate
};

/// Basis pursuit min ||z||_1 s.t. D z = y by ADMM (alternating-direction
/// splitting between the affine set and the l1 prox).
///
/// The affine projection reuses one Cholesky factor of D D^T, so build one
/// solver per D and call it for every column.
class BasisPursuit {
 public:
  BasisPursuit(const Mat& d, const SolverConfig& cfg) : d_(d), cfg_(cfg), chol_(matmul(d, d.transpose())) {
    cfg_.validate();
    if (d.rows() > d.cols()) throw RankDeficient("basis pursuit: D must have at least as many columns as rows");
  }

  const SolverConfig& config() const noexcept { return cfg_; }

  BasisPursuitColumn solve(std::span<const double> y) const {
    const std::size_t n = d_.cols();
    if (y.size() != d_.rows()) throw DimensionMismatch("basis pursuit: rhs length mismatch");
    const double ynorm = norm2(y);
    const double feas = cfg_.feas_tol * (1.0 + ynorm);

    BasisPursuitColumn out;
    if (ynorm == 0.0) {
      out.z.assign(n, 0.0);
      out.converged = true;
      out.debiased = true;
      return out;
    }

    Vec x(n, 0.0), z(n, 0.0), u(n, 0.0), zprev(n), v(n);
    const double shrink = 1.0 / cfg_.bp_rho;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int it = 1; it <= cfg_.bp_max_iter; ++it) {
      for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - u[i];
      x = project(v, y);
      zprev = z;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = x[i] + u[i];
        z[i] = std::copysign(std::max(std::abs(w) - shrink, 0.0), w);
        u[i] += x[i] - z[i];
      }
      out.iterations = it;
      const double primal = norm2(subtract(x, z));
      const double dual = cfg_.bp_rho * norm2(subtract(z, zprev));
      const double eps_pri = cfg_.bp_tol_abs * sqrt_n + cfg_.bp_tol_rel * std::max(norm2(x), norm2(z));
      const double eps_dual = cfg_.bp_tol_abs * sqrt_n + cfg_.bp_tol_rel * cfg_.bp_rho * norm2(u);
      if (primal <= eps_pri && dual <= eps_dual &&
          detail::column_residual(d_, project(z, y), y) <= feas) {
        out.converged = true;
        break;
      }
    }

    // Support from the shrinkage iterate, then re-fit on it. Coefficients that
    // the re-fit pushes under the zero cutoff are dropped and the fit repeated.
    IndexSet support = support_with_cutoff(z, zero_cutoff(cfg_.eps_zero, max_abs(z)));
    while (!support.empty()) {
      const auto ls = least_squares(d_.select_columns(support), y);
      if (ls.residual > feas) break;
      const double cut = zero_cutoff(cfg_.eps_zero, max_abs(ls.x));
      IndexSet kept;
      for (std::size_t i = 0; i < support.size(); ++i)
        if (std::abs(ls.x[i]) > cut) kept.push_back(support[i]);
      if (kept.size() == support.size()) {
        out.z.assign(n, 0.0);
        for (std::size_t i = 0; i < support.size(); ++i) out.z[support[i]] = ls.x[i];
        out.residual = ls.residual;
        out.debiased = true;
        return out;
      }
      support = std::move(kept);
    }

    out.z = project(z, y);
    out.residual = detail::column_residual(d_, out.z, y);
    return out;
  }

 private:
  // v - D^T (D D^T)^{-1} (D v - y)
  Vec project(std::span<const double> v, std::span<const double> y) const {
    const Vec r = subtract(matvec(d_, v), y);
    const Vec c = chol_.solve(r);
    const Vec corr = matvec_transposed(d_, c);
    Vec out(v.begin(), v.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= corr[i];
    return out;
  }

  Mat d_;
  SolverConfig cfg_;
  Cholesky chol_;
};

inline BasisPursuitColumn basis_pursuit_column(const Mat& d, std::span<const double> y, const SolverConfig& cfg = {}) {
  return BasisPursuit(d, cfg).solve(y);
}

/// Basis pursuit applied column by column. The constraint
/// vec(F) = (D kron I) vec(E) is block diagonal after permuting rows, so the
/// joint l1 problem separates into these L independent problems.
inline SchemeOutcome bp_encode(const Mat& d, const Mat& f, const SolverConfig& cfg = {}) {
  detail::check_shapes(d, f);
  const BasisPursuit bp(d, cfg);
  const std::size_t n = d.cols(), l = f.cols();
  Mat e(n, l);
  Diagnostics diag{Method::basis_pursuit, cfg.eps_zero, cfg.feas_tol, 0.0, std::vector<ColumnDiagnostics>(l)};
  for (std::size_t col = 0; col < l; ++col) {
    const auto r = bp.solve(f.column(col));
    e.set_column(col, r.z);
    auto& cd = diag.columns[col];
    cd.iterations = r.iterations;
    cd.converged = r.converged;
    cd.residual = r.residual;
  }
  return detail::finish(d, f, std::move(e), std::move(diag));
}

inline SchemeOutcome solve_scheme(Method m, const Mat& d, const Mat& f, RngSeed seed, const SolverConfig& cfg = {}) {
  switch (m) {
    case Method::zero_forcing: return zero_forcing_scheme(d, f, seed, cfg);
    case Method::l0: return l0_min_encode(d, f, cfg);
    case Method::basis_pursuit: return bp_encode(d, f, cfg);
  }
  throw InvalidArgument("unknown method");
}

}  // namespace sdc
