#pragma once

// Report assembly: a human-readable section followed by a fenced JSON block,
// and the convergence table as CSV. Numbers are printed with 17 significant
// digits so a rerun with the same seed reproduces the text exactly.

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "saddle/galerkin.hpp"
#include "saddle/spectral.hpp"
#include "saddle/stability.hpp"
#include "saddle/verdict.hpp"

namespace saddle::report {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCsvHeader =
    "level,m_h,C_h,error_u,error_p,best_u,best_p,lhs,rhs,effective_constant";

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Constants {
  double m = 0;
  double M = 0;
  Index kernel_dim = 0;
  LambdaBrackets brackets;
};

struct Report {
  std::string tool_version = kToolVersion;
  std::string problem_descriptor;
  Index nv = 0;
  Index nq = 0;
  std::optional<Constants> constants;
  std::optional<Vector> spectrum_T;
  std::optional<Vector> spectrum_T_S0;
  std::vector<Verdict> verdicts;
  std::optional<StabilitySummary> stability;
  std::vector<ConvergenceRecord> convergence;

  bool pass() const { return all_pass(verdicts); }
};

inline std::string csv(const std::vector<ConvergenceRecord>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.level << ',' << num(r.m_h) << ',' << num(r.C_h) << ',' << num(r.error_u) << ','
       << num(r.error_p) << ',' << num(r.best_u) << ',' << num(r.best_p) << ',' << num(r.lhs) << ','
       << num(r.rhs) << ',' << num(r.effective_constant) << '\n';
  }
  return os.str();
}

namespace detail {

inline nlohmann::json vec(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

/// "value xK" groups for printing a spectrum compactly.
inline std::string clusters(const Vector& v) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : cluster_values(v)) {
    os << (first ? "" : ", ") << num(c.center);
    if (c.count > 1) os << " x" << c.count;
    first = false;
  }
  return os.str();
}

}  // namespace detail

inline nlohmann::json to_json(const Report& r) {
  using nlohmann::json;
  json j;
  j["tool_version"] = r.tool_version;
  j["problem"] = r.problem_descriptor;
  j["dims"] = {{"n_V", r.nv}, {"n_Q", r.nq}};
  if (r.constants) {
    const auto& c = *r.constants;
    j["constants"] = {{"m", c.m},
                      {"M", c.M},
                      {"kernel_dim", c.kernel_dim},
                      {"lam_m_minus", c.brackets.lam_m_minus},
                      {"lam_m_plus", c.brackets.lam_m_plus},
                      {"lam_M_minus", c.brackets.lam_M_minus},
                      {"lam_M_plus", c.brackets.lam_M_plus}};
  }
  if (r.spectrum_T || r.spectrum_T_S0) {
    j["spectra"] = json::object();
    if (r.spectrum_T) j["spectra"]["T"] = detail::vec(*r.spectrum_T);
    if (r.spectrum_T_S0) j["spectra"]["T_S0"] = detail::vec(*r.spectrum_T_S0);
  }
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) {
    j["verdicts"].push_back({{"name", v.name},
                             {"measured", v.measured},
                             {"tolerance", v.tolerance},
                             {"pass", v.pass},
                             {"counted", v.counted},
                             {"detail", v.detail}});
  }
  if (r.stability) {
    const auto& s = *r.stability;
    json st = {{"samples", s.samples},
               {"weighted_min", s.weighted_min},
               {"weighted_max", s.weighted_max},
               {"natural_min", s.natural_min},
               {"natural_max", s.natural_max},
               {"natural_sharp_interval", {s.natural_sharp_lo, s.natural_sharp_hi}},
               {"natural_bracket_interval", {s.natural_bracket_lo, s.natural_bracket_hi}},
               {"natural_bracket_applicable", s.natural_bracket_applicable},
               {"corollary_min_slack", s.corollary_min_slack},
               {"natural_lower_as_printed_min_slack", s.lower_as_printed_min_slack}};
    st["endpoints"] = json::array();
    for (const auto& e : s.endpoints) {
      st["endpoints"].push_back(
          {{"target", to_string(e.target)}, {"ratio", e.ratio}, {"expected", e.expected}, {"error", e.error}});
    }
    j["stability"] = st;
  }
  if (!r.convergence.empty()) {
    j["convergence"] = json::array();
    for (const auto& c : r.convergence) {
      j["convergence"].push_back({{"level", c.level},
                                  {"m_h", c.m_h},
                                  {"C_h", c.C_h},
                                  {"D_h", c.D_h},
                                  {"error_u", c.error_u},
                                  {"error_p", c.error_p},
                                  {"best_u", c.best_u},
                                  {"best_p", c.best_p},
                                  {"lhs", c.lhs},
                                  {"rhs", c.rhs},
                                  {"effective_constant", c.effective_constant},
                                  {"weighted_lhs", c.weighted_lhs},
                                  {"weighted_rhs", c.weighted_rhs},
                                  {"split_u_constant", c.split_u_constant},
                                  {"split_p_constant", c.split_p_constant}});
    }
  }
  j["pass"] = r.pass();
  return j;
}

inline void write_text(std::ostream& os, const Report& r) {
  os << "saddle-verify " << r.tool_version << '\n';
  os << "problem: " << r.problem_descriptor << '\n';
  os << "dims: n_V=" << r.nv << " n_Q=" << r.nq << '\n';
  if (r.constants) {
    const auto& c = *r.constants;
    os << "\n[constants]\n";
    os << "m = " << num(c.m) << "\nM = " << num(c.M) << "\nkernel_dim = " << c.kernel_dim << '\n';
    os << "lam_m- = " << num(c.brackets.lam_m_minus) << "  lam_m+ = " << num(c.brackets.lam_m_plus) << '\n';
    os << "lam_M- = " << num(c.brackets.lam_M_minus) << "  lam_M+ = " << num(c.brackets.lam_M_plus) << '\n';
  }
  if (r.spectrum_T) os << "\n[spectrum T]\n" << detail::clusters(*r.spectrum_T) << '\n';
  if (r.spectrum_T_S0) os << "\n[spectrum T_S0]\n" << detail::clusters(*r.spectrum_T_S0) << '\n';
  if (r.stability) {
    const auto& s = *r.stability;
    os << "\n[stability]\n";
    os << "samples = " << s.samples << '\n';
    os << "weighted ratio range = [" << num(s.weighted_min) << ", " << num(s.weighted_max) << "]\n";
    os << "natural ratio range  = [" << num(s.natural_min) << ", " << num(s.natural_max) << "]\n";
    os << "natural sharp interval = [" << num(s.natural_sharp_lo) << ", " << num(s.natural_sharp_hi) << "]\n";
    os << "natural bracket [|lam_m-|, lam_M+] = [" << num(s.natural_bracket_lo) << ", "
       << num(s.natural_bracket_hi) << "]" << (s.natural_bracket_applicable ? "" : " (not applicable)")
       << '\n';
    for (const auto& e : s.endpoints) {
      os << "endpoint " << to_string(e.target) << ": ratio " << num(e.ratio) << " expected "
         << num(e.expected) << '\n';
    }
  }
  if (!r.convergence.empty()) os << "\n[convergence]\n" << csv(r.convergence);
  os << "\n[verdicts]\n";
  for (const auto& v : r.verdicts) {
    os << (v.counted ? (v.pass ? "PASS " : "FAIL ") : "INFO ") << v.name << " measured=" << num(v.measured)
       << " tol=" << num(v.tolerance);
    if (!v.detail.empty()) os << "  (" << v.detail << ')';
    os << '\n';
  }
  os << "\noverall: " << (r.pass() ? "PASS" : "FAIL") << '\n';
  os << "\n```json\n" << to_json(r).dump(2) << "\n```\n";
}

inline std::string to_text(const Report& r) {
  std::ostringstream os;
  write_text(os, r);
  return os.str();
}

}  // namespace saddle::report
