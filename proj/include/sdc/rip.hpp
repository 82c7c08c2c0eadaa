#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "sdc/error.hpp"
#include "sdc/linalg.hpp"
#include "sdc/matrix.hpp"

namespace sdc {

inline constexpr double kRipEnumerationLimit = 1e6;
inline constexpr double kRipCertificateThreshold = 1.0 / 3.0;

struct RipReport {
  std::size_t s = 0;
  double delta_s = 0.0;
  bool certified = false;  // delta_s < 1/3
  std::uint64_t subsets_evaluated = 0;
  IndexSet argmax_subset;
};

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

/// max |lambda| of A_S^T A_S - I for a column subset S.
inline double gram_deviation(const Mat& a, std::span<const std::size_t> subset) {
  Mat g = gram(a.select_columns(subset));
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  const Vec ev = symmetric_eigenvalues(g);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// Restricted isometry constant
///   delta_s(A) = max over |S| <= s of || A_S^T A_S - I ||_{2->2}
/// by exhaustive enumeration of all nonempty column subsets of size <= s.
/// The operator norm is not squared. Throws TooLarge when C(cols, s) > 1e6.
inline RipReport rip_constant(const Mat& a, std::size_t s) {
  const std::size_t n = a.cols();
  if (s < 1 || s > n) throw InvalidArgument("rip_constant: need 1 <= s <= " + std::to_string(n));
  if (binomial(n, s) > kRipEnumerationLimit)
    throw TooLarge("rip_constant: C(" + std::to_string(n) + ", " + std::to_string(s) + ") subsets exceed the limit");

  RipReport rep;
  rep.s = s;
  for (std::size_t k = 1; k <= s; ++k) {
    IndexSet c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = i;
    do {
      ++rep.subsets_evaluated;
      const double dev = gram_deviation(a, c);
      if (dev > rep.delta_s || rep.argmax_subset.empty()) {
        rep.delta_s = std::max(rep.delta_s, dev);
        rep.argmax_subset = c;
      }
    } while (detail::next_combination(c, n));
  }
  rep.certified = rep.delta_s < kRipCertificateThreshold;
  return rep;
}

/// True when delta_{2s}(A) < 1/3, which guarantees that every s-sparse vector
/// is the unique l1 minimizer among solutions of A z = A x.
inline bool rip_certificate(const Mat& a, std::size_t s) { return rip_constant(a, 2 * s).certified; }

struct KronRipCheck {
  double lhs = 0.0;  // delta_s(D kron I_L)
  double rhs = 0.0;  // delta_s(D)
  bool holds = false;
};

inline KronRipCheck kron_rip_check(const Mat& d, std::size_t l, std::size_t s) {
  if (l < 1) throw InvalidArgument("kron_rip_check: L must be positive");
  const Mat big = kron(d, Mat::identity(l));
  KronRipCheck out;
  out.lhs = rip_constant(big, s).delta_s;
  out.rhs = rip_constant(d, std::min(s, d.cols())).delta_s;
  out.holds = out.lhs <= out.rhs + 1e-10;
  return out;
}

/// A / sqrt(rows): the normalization under which sub-Gaussian matrices have
/// unit expected column norm. Not idempotent.
inline Mat scale_for_rip(const Mat& a) { return a.scaled(1.0 / std::sqrt(static_cast<double>(a.rows()))); }

}  // namespace sdc
