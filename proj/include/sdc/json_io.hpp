#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdc/bounds.hpp"
#include "sdc/error.hpp"
#include "sdc/experiment.hpp"
#include "sdc/matrix.hpp"
#include "sdc/protocol.hpp"
#include "sdc/rip.hpp"
#include "sdc/solvers.hpp"

// Matrices are {"rows": r, "cols": c, "data": [row-major entries]}.
template <>
struct nlohmann::adl_serializer<sdc::Mat> {
  static sdc::Mat from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
      throw sdc::InvalidArgument("matrix JSON must be an object with rows, cols and data");
    return sdc::Mat(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                    j.at("data").get<std::vector<double>>());
  }
  static void to_json(nlohmann::json& j, const sdc::Mat& m) {
    j = nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
  }
};

namespace sdc {

using json = nlohmann::json;

inline void to_json(json& j, const ColumnDiagnostics& c) {
  j = json{{"iterations", c.iterations}, {"residual", c.residual}, {"resamples", c.resamples}, {"converged", c.converged}};
  if (!c.subset.empty()) j["subset"] = c.subset;
}

inline void to_json(json& j, const Diagnostics& d) {
  j = json{{"method", to_string(d.method)},       {"eps_zero", d.eps_zero},
           {"feas_tol", d.feas_tol},              {"max_abs_residual", d.max_abs_residual},
           {"converged", d.all_converged()},      {"columns", d.columns}};
}

inline void to_json(json& j, const SchemeOutcome& o) {
  j = json{{"E", o.E}, {"gamma", o.gamma}, {"supports", o.server_supports}, {"diagnostics", o.diagnostics}};
}

inline void to_json(json& j, const RipReport& r) {
  j = json{{"s", r.s},
           {"delta_s", r.delta_s},
           {"certified", r.certified},
           {"subsets_evaluated", r.subsets_evaluated},
           {"argmax_subset", r.argmax_subset}};
}

inline void to_json(json& j, const BoundReport& b) {
  j = json{{"K", b.K},
           {"N", b.N},
           {"L", b.L},
           {"beta", b.params.beta},
           {"kappa", b.params.kappa},
           {"r", b.r},
           {"c", b.c},
           {"kn_ratio", b.kn_ratio},
           {"gamma_star", b.gamma_star},
           {"gamma_star_closed", b.gamma_star_closed ? json(*b.gamma_star_closed) : json(nullptr)},
           {"binding", b.binding},
           {"success_prob_lower", b.success_prob_lower},
           {"vacuous", b.vacuous},
           {"domain_ok", b.domain_ok}};
  json hq = json::array();
  for (const auto& [q, v] : b.hq_inv) hq.push_back({{"q", q}, {"Hq_inv", v}});
  j["Hq_inv"] = hq;
}

inline void to_json(json& j, const Transcript& t) {
  j = json{{"w", t.w},
           {"z", t.z},
           {"multicast_sets", t.multicast_sets},
           {"f_expected", t.f_expected},
           {"f_decoded", t.f_decoded},
           {"max_abs_error", t.max_abs_error},
           {"exact", t.exact},
           {"comm_messages", t.comm_messages}};
}

inline void to_json(json& j, const Dataset& d) { j = json{{"id", d.id}, {"values", d.values}}; }

inline void from_json(const json& j, Dataset& d) {
  d.id = j.at("id").get<std::size_t>();
  d.values = j.at("values").get<Vec>();
  if (d.values.empty()) throw InvalidArgument("dataset " + std::to_string(d.id) + " has no values");
}

inline void to_json(json& j, const SubfunctionSpec& g) { j = json{{"kind", to_string(g.kind)}, {"params", g.params}}; }

inline void from_json(const json& j, SubfunctionSpec& g) {
  g.kind = subfunction_kind_from_string(j.at("kind").get<std::string>());
  g.params = j.contains("params") ? j.at("params").get<Vec>() : Vec{};
  validate(g);
}

// Accepts a bare matrix or any object carrying the matrix under "E"
// (such as a serialized SchemeOutcome).
inline Mat encoding_from_json(const json& j) {
  if (j.is_object() && j.contains("E")) return j.at("E").get<Mat>();
  return j.get<Mat>();
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidArgument("write to '" + path + "' failed");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.s << ',' << r.trials << ',' << detail::csv_number(r.bp_success_rate) << ','
       << detail::csv_optional(r.l0_match_rate) << ',' << detail::csv_number(r.mean_gamma_bp) << ','
       << detail::csv_optional(r.certificate_rate) << '\n';
}

inline constexpr const char* kBoundCsvHeader = "kn_ratio,gamma_star,K_over_N_line,Hq_inv";

/// Threshold curve for plotting: gamma* against K/N, the K/N line itself and
/// H_q^{-1}(K/N) on an even grid of `points` values in (0, max_ratio].
inline void write_bound_csv(std::ostream& os, double r, double q, std::size_t points, double max_ratio = 0.5) {
  os << kBoundCsvHeader << '\n';
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = max_ratio * static_cast<double>(i) / static_cast<double>(points);
    const double g = gamma_threshold_bisect(x, r).gamma;
    const std::string hq = x < 1.0 ? detail::csv_number(q_entropy_inv(x, q)) : std::string();
    os << detail::csv_number(x) << ',' << detail::csv_number(g) << ',' << detail::csv_number(x) << ',' << hq << '\n';
  }
}

}  // namespace sdc
