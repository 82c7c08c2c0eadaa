#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/matrix.hpp"

namespace sdc {

struct Dataset {
  std::size_t id = 0;
  Vec values;
};

enum class SubfunctionKind { sum, mean, max, polyval, pnorm };

/// One per-dataset subfunction g_l. The kinds are a closed set so a round is
/// deterministic. polyval evaluates sum_i params[i] x^i at the dataset's first
/// value; pnorm takes params = {p} with p >= 1.
struct SubfunctionSpec {
  SubfunctionKind kind = SubfunctionKind::sum;
  Vec params;
};

inline std::string to_string(SubfunctionKind k) {
  switch (k) {
    case SubfunctionKind::sum: return "sum";
    case SubfunctionKind::mean: return "mean";
    case SubfunctionKind::max: return "max";
    case SubfunctionKind::polyval: return "polyval";
    case SubfunctionKind::pnorm: return "pnorm";
  }
  return "?";
}

inline SubfunctionKind subfunction_kind_from_string(const std::string& s) {
  if (s == "sum") return SubfunctionKind::sum;
  if (s == "mean") return SubfunctionKind::mean;
  if (s == "max") return SubfunctionKind::max;
  if (s == "polyval") return SubfunctionKind::polyval;
  if (s == "pnorm") return SubfunctionKind::pnorm;
  throw KindMismatch("unknown subfunction kind '" + s + "'");
}

inline void validate(const SubfunctionSpec& g) {
  switch (g.kind) {
    case SubfunctionKind::sum:
    case SubfunctionKind::mean:
    case SubfunctionKind::max:
      if (!g.params.empty()) throw KindMismatch(to_string(g.kind) + " takes no parameters");
      return;
    case SubfunctionKind::polyval:
      if (g.params.empty()) throw KindMismatch("polyval needs at least one coefficient");
      return;
    case SubfunctionKind::pnorm:
      if (g.params.size() != 1 || !(g.params[0] >= 1.0)) throw KindMismatch("pnorm needs a single p >= 1");
      return;
  }
}

inline double evaluate(const SubfunctionSpec& g, std::span<const double> v) {
  validate(g);
  if (v.empty()) throw InvalidArgument("dataset has no values");
  switch (g.kind) {
    case SubfunctionKind::sum: {
      double s = 0.0;
      for (double x : v) s += x;
      return s;
    }
    case SubfunctionKind::mean: {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    }
    case SubfunctionKind::max: return *std::max_element(v.begin(), v.end());
    case SubfunctionKind::polyval: {
      double acc = 0.0;
      for (std::size_t i = g.params.size(); i-- > 0;) acc = acc * v[0] + g.params[i];
      return acc;
    }
    case SubfunctionKind::pnorm: {
      const double p = g.params[0];
      double s = 0.0;
      for (double x : v) s += std::pow(std::abs(x), p);
      return std::pow(s, 1.0 / p);
    }
  }
  throw KindMismatch("unhandled subfunction kind");
}

/// Files w_l = g_l(D_l).
inline Vec compute_files(std::span<const Dataset> datasets, std::span<const SubfunctionSpec> subfunctions) {
  if (datasets.size() != subfunctions.size())
    throw DimensionMismatch("compute_files: " + std::to_string(datasets.size()) + " datasets but " +
                            std::to_string(subfunctions.size()) + " subfunctions");
  Vec w(datasets.size());
  for (std::size_t l = 0; l < datasets.size(); ++l) w[l] = evaluate(subfunctions[l], datasets[l].values);
  return w;
}

/// W_n: the files server n computes (support of row n of E).
inline std::vector<IndexSet> derive_assignment(const Mat& e, double eps_zero = kDefaultEpsZero) {
  return row_supports(e, eps_zero);
}

/// T_n: the users server n transmits to (support of column n of D).
inline std::vector<IndexSet> multicast_targets(const Mat& d, double eps_zero = kDefaultEpsZero) {
  return column_supports(d, eps_zero);
}

/// z = E w, with server n touching only the files in W_n.
inline Vec server_encode(const Mat& e, std::span<const double> w, double eps_zero = kDefaultEpsZero) {
  if (w.size() != e.cols())
    throw DimensionMismatch("server_encode: E has " + std::to_string(e.cols()) + " columns, w has " +
                            std::to_string(w.size()) + " entries");
  const auto assignment = derive_assignment(e, eps_zero);
  Vec z(e.rows(), 0.0);
  for (std::size_t n = 0; n < e.rows(); ++n)
    for (std::size_t l : assignment[n]) z[n] += e(n, l) * w[l];
  return z;
}

/// f' = D z, with user k hearing only the servers n for which k is in T_n.
inline Vec user_decode(const Mat& d, std::span<const double> z, double eps_zero = kDefaultEpsZero) {
  if (z.size() != d.cols())
    throw DimensionMismatch("user_decode: D has " + std::to_string(d.cols()) + " columns, z has " +
                            std::to_string(z.size()) + " entries");
  const auto targets = multicast_targets(d, eps_zero);
  Vec f(d.rows(), 0.0);
  for (std::size_t n = 0; n < d.cols(); ++n)
    for (std::size_t k : targets[n]) f[k] += d(k, n) * z[n];
  return f;
}

struct Transcript {
  Vec w;
  Vec z;
  std::vector<IndexSet> multicast_sets;
  Vec f_expected;
  Vec f_decoded;
  double max_abs_error = 0.0;
  bool exact = false;
  std::size_t comm_messages = 0;
};

inline constexpr double kDefaultDecodeTol = 1e-8;

/// One round: compute files, encode at the servers, broadcast, decode at the
/// users, and compare against the demanded F w.
inline Transcript run_round(const Mat& f, const Mat& d, const Mat& e, std::span<const Dataset> datasets,
                            std::span<const SubfunctionSpec> subfunctions, double decode_tol = kDefaultDecodeTol,
                            double eps_zero = kDefaultEpsZero) {
  if (d.rows() != f.rows() || e.rows() != d.cols() || e.cols() != f.cols())
    throw DimensionMismatch("run_round: need F (KxL), D (KxN), E (NxL); got F " + std::to_string(f.rows()) + "x" +
                            std::to_string(f.cols()) + ", D " + std::to_string(d.rows()) + "x" +
                            std::to_string(d.cols()) + ", E " + std::to_string(e.rows()) + "x" +
                            std::to_string(e.cols()));
  if (datasets.size() != f.cols())
    throw DimensionMismatch("run_round: " + std::to_string(datasets.size()) + " datasets for L = " +
                            std::to_string(f.cols()));
  Transcript t;
  t.w = compute_files(datasets, subfunctions);
  t.f_expected = matvec(f, t.w);
  t.z = server_encode(e, t.w, eps_zero);
  t.multicast_sets = multicast_targets(d, eps_zero);
  t.f_decoded = user_decode(d, t.z, eps_zero);
  for (std::size_t k = 0; k < t.f_expected.size(); ++k)
    t.max_abs_error = std::max(t.max_abs_error, std::abs(t.f_decoded[k] - t.f_expected[k]));
  t.exact = t.max_abs_error <= decode_tol * (1.0 + max_abs(t.f_expected));
  for (const auto& tn : t.multicast_sets) t.comm_messages += tn.size();
  return t;
}

inline std::size_t communication_cost(const Transcript& t) {
  std::size_t c = 0;
  for (const auto& tn : t.multicast_sets) c += tn.size();
  return c;
}

}  // namespace sdc
