#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdc/error.hpp"

namespace sdc {

// -1/e, the branch point of W. Computed as -exp(-1) so that arguments built
// as -2 x exp(-1) hit it exactly at x = 1/2.
inline const double kNegInvE = -std::exp(-1.0);

struct LambertResult {
  double w = 0.0;
  int iterations = 0;
  bool bisected = false;
};

namespace detail {

inline double lambert_residual(double w, double x) { return w * std::exp(w) - x; }

}  // namespace detail

/// Lower real branch W_{-1} of the Lambert function on [-1/e, 0).
///
/// Starting point: the branch-point series in p = -sqrt(2 (1 + e x)) when x is
/// within 1e-3 of -1/e, otherwise the asymptotic ln(-x) - ln(-ln(-x)).
/// Refined by Halley's method (at most 100 steps); if that does not reach a
/// relative residual of 1e-12 the root is bracketed on [-745, -1] and bisected.
inline LambertResult lambert_w_minus1_detailed(double x) {
  if (!(x >= kNegInvE && x < 0.0))
    throw DomainError("lambert_w_minus1: argument " + std::to_string(x) + " outside [-1/e, 0)");
  if (x == kNegInvE) return {-1.0, 0, false};

  double w;
  if (x < kNegInvE + 1e-3) {
    const double p = -std::sqrt(2.0 * (1.0 + std::numbers::e * x));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }
  w = std::min(w, -1.0);

  const double target = 1e-12 * std::abs(x);
  LambertResult out;
  for (int it = 1; it <= 100; ++it) {
    out.iterations = it;
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= 0.25 * target) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    if (!std::isfinite(next)) break;
    w = std::min(next, -1.0);
    if (std::abs(step) <= 1e-16 * std::abs(w)) break;
  }
  if (std::isfinite(w) && std::abs(detail::lambert_residual(w, x)) <= target) {
    out.w = w;
    return out;
  }

  // w e^w decreases from 0 to -1/e as w goes from -inf to -1.
  double lo = -745.0, hi = -1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::lambert_residual(mid, x) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.w = 0.5 * (lo + hi);
  out.bisected = true;
  return out;
}

inline double lambert_w_minus1(double x) { return lambert_w_minus1_detailed(x).w; }

// ---------------------------------------------------------------------------
// Sub-Gaussian constants
// ---------------------------------------------------------------------------

/// Tail parameters for P(|A_ij| >= t) <= beta exp(-kappa t^2).
struct SubGaussianParams {
  double beta = 1.0;
  double kappa = 0.5;

  void validate() const {
    if (!(beta > 0.0 && kappa > 0.0)) throw DomainError("sub-Gaussian parameters must be positive");
  }

  // Standard normal: P(|X| >= t) = erfc(t/sqrt 2) <= exp(-t^2/2).
  static constexpr SubGaussianParams normal() { return {1.0, 0.5}; }
  // Rademacher: P(|X| >= t) = 1 for t <= 1, so beta exp(-kappa) >= 1 is
  // required; beta = e, kappa = 1 is the tightest choice with kappa = 1.
  static constexpr SubGaussianParams rademacher() { return {std::numbers::e, 1.0}; }
};

inline double r_param(const SubGaussianParams& p) {
  p.validate();
  return 12.0 * (4.0 * p.beta + 2.0 * p.kappa) / (p.kappa * p.kappa);
}

inline double c_param(const SubGaussianParams& p) {
  p.validate();
  return 2.0 * (4.0 * p.beta + 2.0 * p.kappa) / (3.0 * p.kappa * p.kappa);
}

/// Number of sub-Gaussian measurements after which delta_{2s}(A / sqrt m) <= delta
/// holds with high probability: 2 c delta^-2 s ln(e p / (2 s)).
inline double measurement_bound(std::size_t s, std::size_t p, const SubGaussianParams& params, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("measurement_bound: delta must lie in (0, 1)");
  if (s < 1 || s > p) throw DomainError("measurement_bound: need 1 <= s <= p");
  const double arg = std::numbers::e * static_cast<double>(p) / (2.0 * static_cast<double>(s));
  if (arg <= 1.0) throw DomainError("measurement_bound: 2s >= e p, logarithm is nonpositive");
  return 2.0 * c_param(params) / (delta * delta) * static_cast<double>(s) * std::log(arg);
}

// ---------------------------------------------------------------------------
// Computation-cost threshold
// ---------------------------------------------------------------------------

struct GammaThreshold {
  double gamma = 1.0;
  bool binding = true;  // false when K/N > 1/2: the sparsity condition always holds
};

// r g ln(e / (2 r g)), increasing on (0, 1/(2r)] where it reaches 1/2.
inline double cost_condition_lhs(double gamma, double r) {
  return r * gamma * std::log(std::numbers::e / (2.0 * r * gamma));
}

/// Largest gamma on (0, 1/(2r)] with r gamma ln(e / (2 r gamma)) <= K/N, by
/// bisection. Ground truth for gamma_threshold_closed.
inline GammaThreshold gamma_threshold_bisect(double kn_ratio, double r) {
  if (!(kn_ratio > 0.0) || !(r > 0.0)) throw DomainError("gamma_threshold: need K/N > 0 and r > 0");
  const double peak = 1.0 / (2.0 * r);
  if (kn_ratio > 0.5) return {1.0, false};
  if (kn_ratio == 0.5) return {std::min(peak, 1.0), true};
  double lo = 0.0, hi = peak;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cost_condition_lhs(mid, r) <= kn_ratio)
      lo = mid;
    else
      hi = mid;
  }
  return {std::min(lo, 1.0), true};
}

/// Closed form -(K/N) / (r W_{-1}(-2 (K/N) / e)) of the same threshold,
/// valid for 0 < K/N <= 1/2.
inline double gamma_threshold_closed(double kn_ratio, double r) {
  if (!(kn_ratio > 0.0 && kn_ratio <= 0.5)) throw DomainError("gamma_threshold_closed: K/N must lie in (0, 1/2]");
  if (!(r > 0.0)) throw DomainError("gamma_threshold_closed: r must be positive");
  const double arg = std::max(-2.0 * kn_ratio * std::exp(-1.0), kNegInvE);
  return std::min(-kn_ratio / (r * lambert_w_minus1(arg)), 1.0);
}

/// KL >= r e0 ln(e N L / (2 r e0)), evaluated literally (true for e0 = 0).
inline bool kl_condition(std::size_t k, std::size_t n, std::size_t l, std::size_t e0_count, double r) {
  if (e0_count == 0) return true;
  const double e0 = static_cast<double>(e0_count);
  const double nl = static_cast<double>(n) * static_cast<double>(l);
  const double kl = static_cast<double>(k) * static_cast<double>(l);
  return kl >= r * e0 * std::log(std::numbers::e * nl / (2.0 * r * e0));
}

struct SuccessProbability {
  double value = 0.0;  // 1 - 2 exp(-KL / r), not clamped
  bool vacuous = true;
};

inline SuccessProbability success_prob_bound(std::size_t k, std::size_t l, double r) {
  if (!(r > 0.0)) throw DomainError("success_prob_bound: r must be positive");
  const double v = 1.0 - 2.0 * std::exp(-static_cast<double>(k) * static_cast<double>(l) / r);
  return {v, v <= 0.0};
}

// ---------------------------------------------------------------------------
// q-ary entropy
// ---------------------------------------------------------------------------

/// H_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x), for 0 < x < 1 - 1/q.
inline double q_entropy(double x, double q) {
  if (!(q >= 2.0) || q != std::floor(q)) throw DomainError("q_entropy: q must be an integer >= 2");
  if (!(x > 0.0 && x < 1.0 - 1.0 / q)) throw DomainError("q_entropy: x must lie in (0, 1 - 1/q)");
  const double lq = std::log(q);
  return (x * std::log(q - 1.0) - x * std::log(x) - (1.0 - x) * std::log1p(-x)) / lq;
}

/// Inverse of H_q on (0, 1 - 1/q) by bisection (H_q is increasing there).
inline double q_entropy_inv(double y, double q) {
  if (!(q >= 2.0) || q != std::floor(q)) throw DomainError("q_entropy_inv: q must be an integer >= 2");
  if (!(y > 0.0 && y < 1.0)) throw DomainError("q_entropy_inv: y must lie in (0, 1)");
  double lo = 0.0, hi = 1.0 - 1.0 / q;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (q_entropy(mid, q) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct BoundReport {
  std::size_t K = 0, N = 0, L = 0;
  SubGaussianParams params;
  double r = 0.0;
  double c = 0.0;
  double kn_ratio = 0.0;
  double gamma_star = 0.0;                          // bisection
  std::optional<double> gamma_star_closed;          // only for K/N <= 1/2
  bool binding = true;
  double success_prob_lower = 0.0;
  bool vacuous = true;
  bool domain_ok = true;                            // K/N <= r/2
  std::vector<std::pair<double, double>> hq_inv;    // (q, H_q^{-1}(K/N)) when K/N < 1
};

inline BoundReport bound_report(std::size_t k, std::size_t n, std::size_t l, const SubGaussianParams& p) {
  if (k == 0 || n == 0 || l == 0) throw DomainError("bound_report: K, N, L must be positive");
  BoundReport rep;
  rep.K = k;
  rep.N = n;
  rep.L = l;
  rep.params = p;
  rep.r = r_param(p);
  rep.c = c_param(p);
  rep.kn_ratio = static_cast<double>(k) / static_cast<double>(n);
  const auto th = gamma_threshold_bisect(rep.kn_ratio, rep.r);
  rep.gamma_star = th.gamma;
  rep.binding = th.binding;
  if (rep.kn_ratio <= 0.5) rep.gamma_star_closed = gamma_threshold_closed(rep.kn_ratio, rep.r);
  const auto sp = success_prob_bound(k, l, rep.r);
  rep.success_prob_lower = sp.value;
  rep.vacuous = sp.vacuous;
  rep.domain_ok = rep.kn_ratio <= rep.r / 2.0;
  if (rep.kn_ratio < 1.0)
    for (double q : {2.0, 256.0}) rep.hq_inv.emplace_back(q, q_entropy_inv(rep.kn_ratio, q));
  return rep;
}

}  // namespace sdc
