#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/matrix.hpp"
#include "sdc/random.hpp"
#include "sdc/rip.hpp"
#include "sdc/solvers.hpp"

namespace sdc {

enum class Ensemble { gaussian, rademacher };

inline std::string to_string(Ensemble e) { return e == Ensemble::gaussian ? "gaussian" : "rademacher"; }

inline Ensemble ensemble_from_string(const std::string& s) {
  if (s == "gaussian") return Ensemble::gaussian;
  if (s == "rademacher") return Ensemble::rademacher;
  throw InvalidArgument("unknown ensemble '" + s + "'");
}

inline Mat ensemble_matrix(Ensemble e, std::size_t rows, std::size_t cols, RngSeed seed) {
  return e == Ensemble::gaussian ? gaussian_matrix(rows, cols, seed) : rademacher_matrix(rows, cols, seed);
}

struct InstanceConfig {
  std::size_t K = 1, N = 1, L = 1;
  Ensemble ensemble = Ensemble::gaussian;
  RngSeed seed;
  std::optional<std::size_t> planted_sparsity;  // empty: random dense demand

  void validate() const {
    if (K == 0 || N == 0 || L == 0) throw InvalidArgument("K, N, L must be positive");
    if (K > N) throw InvalidArgument("need K <= N");
    if (planted_sparsity && (*planted_sparsity < 1 || *planted_sparsity > N))
      throw InvalidArgument("planted sparsity must lie in [1, N]");
  }
};

struct Instance {
  Mat D;
  Mat F;
  std::optional<Mat> E0;
};

/// N x L matrix whose columns each have exactly s nonzeros on a uniformly
/// random support. Nonzeros are +-(0.5 + |g|), g standard normal, so planted
/// entries stay far above any zero cutoff.
inline Mat planted_sparse_matrix(std::size_t n, std::size_t l, std::size_t s, RngSeed seed) {
  if (s > n) throw InvalidArgument("planted sparsity exceeds N");
  Rng rng(seed);
  Mat e(n, l);
  for (std::size_t col = 0; col < l; ++col) {
    const IndexSet supp = rng.subset(n, s);
    for (std::size_t i : supp) {
      const double sign = rng.sign();
      e(i, col) = sign * (0.5 + std::abs(rng.normal()));
    }
  }
  return e;
}

/// D from the ensemble under derive_seed(seed, 0); F either i.i.d. standard
/// normal under derive_seed(seed, 1), or D E0 with E0 planted under
/// derive_seed(seed, 2).
inline Instance generate_instance(const InstanceConfig& cfg) {
  cfg.validate();
  Instance inst{ensemble_matrix(cfg.ensemble, cfg.K, cfg.N, derive_seed(cfg.seed, 0)), Mat(cfg.K, cfg.L), std::nullopt};
  if (cfg.planted_sparsity) {
    Mat e0 = planted_sparse_matrix(cfg.N, cfg.L, *cfg.planted_sparsity, derive_seed(cfg.seed, 2));
    inst.F = matmul(inst.D, e0);
    inst.E0 = std::move(e0);
  } else {
    inst.F = gaussian_matrix(cfg.K, cfg.L, derive_seed(cfg.seed, 1));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Phase-transition sweep
// ---------------------------------------------------------------------------

inline constexpr double kRecoveryTol = 1e-6;

struct SweepRow {
  std::size_t s = 0;
  std::size_t trials = 0;
  double bp_success_rate = 0.0;
  std::optional<double> l0_match_rate;
  double mean_gamma_bp = 0.0;
  std::optional<double> certificate_rate;
};

struct SweepConfig {
  std::size_t K = 5, N = 10, L = 1;
  Ensemble ensemble = Ensemble::gaussian;
  RngSeed seed;
  std::size_t s_min = 0, s_max = 10;
  std::size_t trials = 100;
  unsigned workers = 0;  // 0: hardware concurrency
  SolverConfig solver;
};

struct TrialResult {
  bool bp_success = false;
  std::optional<bool> l0_match;
  double gamma_bp = 0.0;
  std::optional<bool> certified;
};

/// One sweep trial. Its D and E0 come from derive_seed(master, s, trial), so
/// every (s, trial) cell can be reproduced on its own.
inline TrialResult run_sweep_trial(const SweepConfig& cfg, std::size_t s, std::size_t trial) {
  const RngSeed ts = derive_seed(cfg.seed, s, trial);
  const Mat d = ensemble_matrix(cfg.ensemble, cfg.K, cfg.N, derive_seed(ts, 0));
  Mat e0 = planted_sparse_matrix(cfg.N, cfg.L, s, derive_seed(ts, 2));
  const Mat f = matmul(d, e0);

  TrialResult tr;
  const auto bp = bp_encode(d, f, cfg.solver);
  tr.bp_success = max_abs_diff(bp.E, e0) <= kRecoveryTol;
  tr.gamma_bp = bp.gamma;

  if (cfg.N <= kL0MaxColumns) {
    try {
      const auto l0 = l0_min_encode(d, f, cfg.solver);
      tr.l0_match = column_supports(l0.E, cfg.solver.eps_zero) == column_supports(bp.E, cfg.solver.eps_zero);
    } catch (const Error&) {
    }
  }
  if (s == 0) {
    tr.certified = true;
  } else if (2 * s <= cfg.N && binomial(cfg.N, 2 * s) <= kRipEnumerationLimit) {
    tr.certified = rip_certificate(scale_for_rip(d), s);
  }
  return tr;
}

/// Monte Carlo recovery sweep over planted sparsity s in [s_min, s_max].
/// Trials run on a thread pool; rows come out ordered by s regardless of
/// completion order. Optional columns are empty when any trial in the cell
/// could not evaluate them.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.K == 0 || cfg.N == 0 || cfg.L == 0 || cfg.K > cfg.N) throw InvalidArgument("sweep: need 0 < K <= N, L > 0");
  if (cfg.trials == 0) throw InvalidArgument("sweep: trials must be positive");
  if (cfg.s_min > cfg.s_max || cfg.s_max > cfg.N) throw InvalidArgument("sweep: need s_min <= s_max <= N");

  const std::size_t cells = cfg.s_max - cfg.s_min + 1;
  const std::size_t jobs = cells * cfg.trials;
  std::vector<TrialResult> results(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs && !failed; j = next++) {
      try {
        results[j] = run_sweep_trial(cfg, cfg.s_min + j / cfg.trials, j % cfg.trials);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  unsigned nw = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  nw = static_cast<unsigned>(std::min<std::size_t>(nw, jobs));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < nw; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t c = 0; c < cells; ++c) {
    SweepRow row;
    row.s = cfg.s_min + c;
    row.trials = cfg.trials;
    std::size_t ok = 0, l0_ok = 0, l0_n = 0, cert = 0, cert_n = 0;
    double gsum = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const auto& r = results[c * cfg.trials + t];
      ok += r.bp_success;
      gsum += r.gamma_bp;
      if (r.l0_match) {
        ++l0_n;
        l0_ok += *r.l0_match;
      }
      if (r.certified) {
        ++cert_n;
        cert += *r.certified;
      }
    }
    const auto n = static_cast<double>(cfg.trials);
    row.bp_success_rate = static_cast<double>(ok) / n;
    row.mean_gamma_bp = gsum / n;
    if (l0_n == cfg.trials) row.l0_match_rate = static_cast<double>(l0_ok) / n;
    if (cert_n == cfg.trials) row.certificate_rate = static_cast<double>(cert) / n;
    rows.push_back(row);
  }
  return rows;
}

inline constexpr const char* kSweepCsvHeader = "s,trials,bp_success_rate,l0_match_rate,mean_gamma_bp,certificate_rate";

}  // namespace sdc
