// Command-line front end: gen | solve | bound | rip | simulate | sweep.
//
// Exit codes: 0 success, 1 infeasible or inexact, 2 usage / bad input,
// 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sdc/json_io.hpp"
#include "sdc/sdc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInexact = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    sdc::write_text_file(out_path, text);
}

sdc::Method parse_method(const std::string& m) {
  if (m == "zf") return sdc::Method::zero_forcing;
  if (m == "l0") return sdc::Method::l0;
  if (m == "bp") return sdc::Method::basis_pursuit;
  throw sdc::InvalidArgument("unknown method '" + m + "'");
}

struct SubGaussianFlags {
  std::optional<double> beta, kappa;
  std::string preset = "normal";

  sdc::SubGaussianParams params() const {
    sdc::SubGaussianParams p;
    if (preset == "normal")
      p = sdc::SubGaussianParams::normal();
    else if (preset == "rademacher")
      p = sdc::SubGaussianParams::rademacher();
    else
      throw sdc::InvalidArgument("unknown preset '" + preset + "'");
    if (beta) p.beta = *beta;
    if (kappa) p.kappa = *kappa;
    p.validate();
    return p;
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--beta", beta, "Sub-Gaussian tail parameter beta (overrides preset)");
    cmd->add_option("--kappa", kappa, "Sub-Gaussian tail parameter kappa (overrides preset)");
    cmd->add_option("--preset", preset, "Parameter preset: normal | rademacher")->capture_default_str();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse encoding matrices for multi-user linearly-separable distributed computing"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;
  double eps_zero = sdc::kDefaultEpsZero;
  double feas_tol = 1e-9;

  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--eps-zero", eps_zero, "Relative zero threshold")->capture_default_str();
    cmd->add_option("--feas-tol", feas_tol, "Feasibility tolerance")->capture_default_str();
  };

  // gen
  auto* gen = app.add_subcommand("gen", "Generate D.json and F.json (and E0.json for planted demands)");
  std::size_t K = 0, N = 0, L = 0;
  std::string ensemble = "gaussian", demand = "random_dense";
  std::size_t planted_s = 1;
  gen->add_option("--K", K, "Users")->required();
  gen->add_option("--N", N, "Servers")->required();
  gen->add_option("--L", L, "Datasets")->required();
  gen->add_option("--ensemble", ensemble, "gaussian | rademacher")->capture_default_str();
  gen->add_option("--demand", demand, "random_dense | planted_sparse")->capture_default_str();
  gen->add_option("--s", planted_s, "Per-column sparsity for planted_sparse")->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out, "Output directory")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Synthesize an encoding matrix E with D E = F");
  std::string d_file, f_file, e_file, method = "bp";
  bool with_bounds = false;
  SubGaussianFlags sg;
  solve->add_option("--D", d_file, "Decoding matrix JSON")->required();
  solve->add_option("--F", f_file, "Demand matrix JSON")->required();
  solve->add_option("--method", method, "zf | l0 | bp")->capture_default_str();
  solve->add_option("--seed", seed, "Seed for the zero-forcing subset draws")->capture_default_str();
  solve->add_option("--out", out, "Write the outcome JSON here instead of stdout");
  solve->add_flag("--bounds", with_bounds, "Also report the threshold gamma* for these dimensions");
  sg.add_to(solve);
  add_solver_flags(solve);

  // bound
  auto* bound = app.add_subcommand("bound", "Evaluate r, c, gamma*, and the success-probability bound");
  std::string csv_path;
  std::size_t csv_points = 50;
  double q = 256;
  bound->add_option("--K", K)->required();
  bound->add_option("--N", N)->required();
  bound->add_option("--L", L)->required();
  bound->add_option("--csv", csv_path, "Also write the threshold curve as CSV");
  bound->add_option("--points", csv_points, "Curve points")->capture_default_str();
  bound->add_option("--q", q, "Alphabet size for the H_q^{-1} comparison column")->capture_default_str();
  bound->add_option("--out", out);
  SubGaussianFlags sg_bound;
  sg_bound.add_to(bound);

  // rip
  auto* rip = app.add_subcommand("rip", "Exhaustive restricted isometry constant of a matrix");
  std::string m_file;
  std::size_t rip_s = 1;
  bool scale = false, certificate = false;
  rip->add_option("--matrix", m_file, "Matrix JSON")->required();
  rip->add_option("--s", rip_s, "Sparsity level")->required();
  rip->add_flag("--scale", scale, "Divide by sqrt(rows) first");
  rip->add_flag("--certificate", certificate, "Report delta_{2s} and whether it is below 1/3");
  rip->add_option("--out", out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run one compute/transmit/decode round");
  std::string round_file, datasets_file, subfunctions_file;
  double decode_tol = sdc::kDefaultDecodeTol;
  sim->add_option("--round", round_file, "Combined JSON {F, D, E, datasets, subfunctions}");
  sim->add_option("--D", d_file);
  sim->add_option("--F", f_file);
  sim->add_option("--E", e_file, "Matrix JSON or a solve outcome");
  sim->add_option("--datasets", datasets_file);
  sim->add_option("--subfunctions", subfunctions_file);
  sim->add_option("--decode-tol", decode_tol)->capture_default_str();
  sim->add_option("--eps-zero", eps_zero)->capture_default_str();
  sim->add_option("--out", out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo basis-pursuit recovery sweep (CSV)");
  sdc::SweepConfig sc;
  sweep->add_option("--K", sc.K)->required();
  sweep->add_option("--N", sc.N)->required();
  sweep->add_option("--L", sc.L)->capture_default_str();
  sweep->add_option("--ensemble", ensemble)->capture_default_str();
  sweep->add_option("--seed", seed)->capture_default_str();
  sweep->add_option("--trials", sc.trials)->capture_default_str();
  std::optional<std::size_t> s_min, s_max;
  sweep->add_option("--s-min", s_min, "Default 0");
  sweep->add_option("--s-max", s_max, "Default N");
  sweep->add_option("--workers", sc.workers, "Threads (0 = all cores)")->capture_default_str();
  sweep->add_option("--out", out);
  add_solver_flags(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      sdc::InstanceConfig cfg{K, N, L, sdc::ensemble_from_string(ensemble), sdc::RngSeed{seed}, std::nullopt};
      if (demand == "planted_sparse")
        cfg.planted_sparsity = planted_s;
      else if (demand != "random_dense")
        throw sdc::InvalidArgument("unknown demand '" + demand + "'");
      const auto inst = sdc::generate_instance(cfg);
      std::filesystem::create_directories(out);
      const std::filesystem::path dir(out);
      sdc::write_text_file((dir / "D.json").string(), sdc::dump(inst.D));
      sdc::write_text_file((dir / "F.json").string(), sdc::dump(inst.F));
      if (inst.E0) sdc::write_text_file((dir / "E0.json").string(), sdc::dump(*inst.E0));
      return kExitOk;
    }

    if (*solve) {
      const auto d = sdc::read_json_file(d_file).get<sdc::Mat>();
      const auto f = sdc::read_json_file(f_file).get<sdc::Mat>();
      sdc::SolverConfig cfg;
      cfg.eps_zero = eps_zero;
      cfg.feas_tol = feas_tol;
      const auto outcome = sdc::solve_scheme(parse_method(method), d, f, sdc::RngSeed{seed}, cfg);
      sdc::json j = outcome;
      const double kn = static_cast<double>(d.rows()) / static_cast<double>(d.cols());
      j["K_over_N"] = kn;
      std::cerr << "gamma = " << outcome.gamma << "  K/N = " << kn;
      if (with_bounds) {
        const auto rep = sdc::bound_report(d.rows(), d.cols(), f.cols(), sg.params());
        j["bound"] = rep;
        std::cerr << "  gamma* = " << rep.gamma_star;
      }
      std::cerr << '\n';
      emit(sdc::dump(j), out);
      if (!outcome.feasible(d, f)) return kExitInexact;
      if (!outcome.diagnostics.all_converged()) return kExitNumerical;
      return kExitOk;
    }

    if (*bound) {
      const auto rep = sdc::bound_report(K, N, L, sg_bound.params());
      emit(sdc::dump(sdc::json(rep)), out);
      if (!csv_path.empty()) {
        std::ostringstream os;
        sdc::write_bound_csv(os, rep.r, q, csv_points);
        sdc::write_text_file(csv_path, os.str());
      }
      return kExitOk;
    }

    if (*rip) {
      auto a = sdc::read_json_file(m_file).get<sdc::Mat>();
      if (scale) a = sdc::scale_for_rip(a);
      const auto rep = sdc::rip_constant(a, certificate ? 2 * rip_s : rip_s);
      emit(sdc::dump(sdc::json(rep)), out);
      return kExitOk;
    }

    if (*sim) {
      sdc::json round;
      if (!round_file.empty()) {
        round = sdc::read_json_file(round_file);
      } else {
        if (d_file.empty() || f_file.empty() || e_file.empty() || datasets_file.empty() || subfunctions_file.empty())
          throw sdc::InvalidArgument("simulate: pass --round, or all of --D --F --E --datasets --subfunctions");
        round["D"] = sdc::read_json_file(d_file);
        round["F"] = sdc::read_json_file(f_file);
        round["E"] = sdc::read_json_file(e_file);
        round["datasets"] = sdc::read_json_file(datasets_file);
        round["subfunctions"] = sdc::read_json_file(subfunctions_file);
      }
      const auto d = round.at("D").get<sdc::Mat>();
      const auto f = round.at("F").get<sdc::Mat>();
      const auto e = sdc::encoding_from_json(round.at("E"));
      const auto datasets = round.at("datasets").get<std::vector<sdc::Dataset>>();
      const auto subfunctions = round.at("subfunctions").get<std::vector<sdc::SubfunctionSpec>>();
      const auto t = sdc::run_round(f, d, e, datasets, subfunctions, decode_tol, eps_zero);
      emit(sdc::dump(sdc::json(t)), out);
      if (!t.exact) {
        std::cerr << "inexact decode: max_abs_error = " << t.max_abs_error << '\n';
        return kExitInexact;
      }
      return kExitOk;
    }

    if (*sweep) {
      sc.ensemble = sdc::ensemble_from_string(ensemble);
      sc.seed = sdc::RngSeed{seed};
      sc.s_min = s_min.value_or(0);
      sc.s_max = s_max.value_or(sc.N);
      sc.solver.eps_zero = eps_zero;
      sc.solver.feas_tol = feas_tol;
      std::ostringstream os;
      sdc::write_sweep_csv(os, sdc::run_sweep(sc));
      emit(os.str(), out);
      return kExitOk;
    }
  } catch (const sdc::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInexact;
  } catch (const sdc::SingularMatrix& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const sdc::RankDeficient& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const sdc::ResampleExhausted& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const sdc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sdc::json::exception& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
