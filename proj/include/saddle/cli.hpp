#pragma once

// Command-line front end. Subcommands:
//   spectrum   spectral verification with Weyl residual spot checks
//   stability  norm ratios over random data, extremal endpoints, a priori bounds
//   converge   Galerkin error bounds over a nested 1D hierarchy
//   analyze    all of the above
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 bad input.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "saddle/galerkin.hpp"
#include "saddle/matrix_market.hpp"
#include "saddle/problems.hpp"
#include "saddle/report.hpp"
#include "saddle/spectral.hpp"
#include "saddle/stability.hpp"

namespace saddle::cli {

struct Options {
  std::string command;
  std::string gen = "prescribed";
  std::vector<double> sv;
  long nv = 0;
  long nq = 0;
  long n = 16;
  std::vector<long> levels;
  long ref = 0;
  std::uint64_t seed = 0;
  long samples = 1000;
  double tol = kDefaultTolerance;
  std::string matrices;
  std::string out;
  bool extremal = false;
  bool congruence = true;
};

/// Endpoint attainment threshold for extremal data.
inline constexpr double kEndpointTolerance = 1e-8;

struct Input {
  SaddleProblem problem;
  std::string descriptor;
  std::optional<DataPair> file_data;
  bool is_mixed_poisson = false;
};

inline Input load_input(const Options& o) {
  if (!o.matrices.empty()) {
    auto loaded = mm::load_problem(o.matrices);
    std::string d = loaded.problem.label();
    return Input{std::move(loaded.problem), d, std::move(loaded.data), false};
  }
  GeneratorSpec spec;
  spec.seed = o.seed;
  spec.congruence = o.congruence;
  if (o.gen == "prescribed") {
    spec.kind = GeneratorKind::Prescribed;
    spec.singular_values = o.sv;
    spec.nv = o.nv > 0 ? o.nv : static_cast<long>(o.sv.size());
  } else if (o.gen == "mixed_poisson_1d") {
    spec.kind = GeneratorKind::MixedPoisson1D;
    spec.n = o.n;
  } else if (o.gen == "random") {
    spec.kind = GeneratorKind::Random;
    spec.nv = o.nv;
    spec.nq = o.nq;
  } else {
    throw Error(ErrorCode::SpecInvalid, "unknown generator '" + o.gen + "'");
  }
  SaddleProblem prob = generate(spec);
  return Input{std::move(prob), describe(spec), std::nullopt, spec.kind == GeneratorKind::MixedPoisson1D};
}

inline void add_spectrum(report::Report& rep, const SaddleProblem& prob, double tol) {
  const SpectralReport sr = verify_lemma1(prob, tol);
  rep.spectrum_T = sr.spectrum_T.eigenvalues;
  rep.spectrum_T_S0 = sr.spectrum_T_S0.eigenvalues;
  for (const auto& v : sr.verdicts) rep.verdicts.push_back(v);

  const auto& br = sr.brackets;
  std::vector<std::pair<std::string, double>> t_points = {
      {"lam_M-", br.lam_M_minus}, {"lam_m-", br.lam_m_minus}, {"lam_m+", br.lam_m_plus}, {"lam_M+", br.lam_M_plus}};
  std::vector<std::pair<std::string, double>> s_points = {{"1-phi", kGoldenMinus}, {"phi", kGoldenPlus}};
  if (prob.kernel_dim() > 0) {
    t_points.emplace_back("1", 1.0);
    s_points.emplace_back("1", 1.0);
  }
  for (const auto& [name, lam] : t_points) {
    rep.verdicts.push_back(at_most("weyl_T(" + name + ")", weyl_residual(prob, lam, Operator::T), tol));
  }
  for (const auto& [name, lam] : s_points) {
    rep.verdicts.push_back(at_most("weyl_T_S0(" + name + ")", weyl_residual(prob, lam, Operator::T_S0), tol));
  }
}

inline void add_stability(report::Report& rep, const Input& in, const Options& o, bool extremal) {
  const SaddleProblem& prob = in.problem;
  const StabilitySummary s = stability_batch(prob, o.samples, o.seed, extremal, o.tol);
  rep.stability = s;
  auto& v = rep.verdicts;
  v.push_back(at_most("weighted_ratio_in_golden_interval", static_cast<double>(s.weighted_violations), 0.0,
                      "range [" + report::num(s.weighted_min) + ", " + report::num(s.weighted_max) + "]"));
  v.push_back(at_most("natural_ratio_in_sharp_interval", static_cast<double>(s.natural_sharp_violations), 0.0,
                      "range [" + report::num(s.natural_min) + ", " + report::num(s.natural_max) + "]"));
  Verdict bracket = at_most("natural_ratio_in_lambda_bracket", static_cast<double>(s.natural_bracket_violations),
                            0.0);
  if (!s.natural_bracket_applicable) {
    bracket.counted = false;
    bracket.detail = "m > sqrt(2) with nontrivial kernel: 1 in sigma(T) lies below |lam_m-|";
  }
  v.push_back(bracket);
  static const char* names[4] = {"corollary_weighted_upper", "corollary_weighted_lower",
                                 "corollary_natural_upper", "corollary_natural_lower"};
  for (std::size_t i = 0; i < 4; ++i) {
    Verdict c = at_most(names[i], -s.corollary_min_slack[i], o.tol, "negated minimum relative slack");
    if (i == 2 && !s.natural_bracket_applicable) c.counted = false;
    v.push_back(c);
  }
  Verdict printed = at_most("corollary_natural_lower_as_printed", -s.lower_as_printed_min_slack, o.tol,
                            "factor 2/(sqrt(M^2+1)+1)");
  printed.counted = false;
  v.push_back(printed);
  for (const auto& e : s.endpoints) {
    v.push_back(at_most(std::string("endpoint_") + to_string(e.target), e.error, kEndpointTolerance,
                        "ratio " + report::num(e.ratio) + " expected " + report::num(e.expected)));
  }
  if (in.file_data) {
    const InfSupConstants c = inf_sup_constants(prob);
    const StabilityRecord r = corollary_bounds(stability_ratios(prob, *in.file_data, c, o.tol), c, o.tol);
    v.push_back(Verdict{"file_data_weighted_ratio", r.ratio_weighted, o.tol, r.weighted_in_golden,
                        "must lie in [(sqrt5-1)/2, (sqrt5+1)/2]", true});
    v.push_back(Verdict{"file_data_natural_ratio", r.ratio_natural, o.tol, r.natural_in_sharp,
                        "must lie in the sharp interval", true});
  }
}

inline void add_convergence(report::Report& rep, const Options& o) {
  if (o.levels.empty()) throw Error(ErrorCode::SpecInvalid, "converge needs --levels");
  std::vector<Index> levels(o.levels.begin(), o.levels.end());
  const Index ref = o.ref > 0 ? o.ref : levels.back();
  if (levels.back() != ref) levels.push_back(ref);
  const Hierarchy h = refine_hierarchy(GeneratorKind::MixedPoisson1D, levels);
  const Manufactured mf = manufactured_mixed_poisson(h.finest);
  const Solution reference = solve_saddle(h.finest, mf.data);
  const AmbientConstants amb = ambient_constants(h.finest);
  for (const auto& lvl : h.levels) {
    if (lvl.n == ref) continue;
    const SaddleProblem restricted = restrict_problem(h.finest, lvl.pair);
    const XZConstants xz = xz_constants(amb, restricted);
    if (!xz.stable) {
      Verdict skipped{"level_" + std::to_string(lvl.n) + "_stable", 0.0, 0.0, false, "m_h = 0, bounds skipped",
                      true};
      rep.verdicts.push_back(skipped);
      continue;
    }
    const ConvergenceRecord r = verify_error_bound(h.finest, restricted, lvl.pair, mf.data, reference, xz,
                                                   static_cast<long>(lvl.n));
    rep.convergence.push_back(r);
    const std::string tag = "level_" + std::to_string(lvl.n);
    rep.verdicts.push_back(Verdict{tag + "_quasi_optimality", r.lhs - r.rhs, kBoundSlack * r.scale,
                                   r.bound_holds, "lhs - C_h^2 * best", true});
    rep.verdicts.push_back(Verdict{tag + "_weighted_quasi_optimality", r.weighted_lhs - r.weighted_rhs,
                                   kBoundSlack * r.scale, r.weighted_bound_holds, "lhs - D_h^2 * best", true});
    rep.verdicts.push_back(at_most(tag + "_effective_constant", r.effective_constant, r.C_h, "<= C_h"));
  }
  for (std::size_t i = 1; i < rep.convergence.size(); ++i) {
    const auto& a = rep.convergence[i - 1];
    const auto& b = rep.convergence[i];
    const double rate = std::log(a.error_u / b.error_u) / std::log(static_cast<double>(b.level) / a.level);
    Verdict v{"rate_error_u_" + std::to_string(a.level) + "_" + std::to_string(b.level), rate, 0.0, true,
              "observed order in h", false};
    rep.verdicts.push_back(v);
  }
}

inline int execute(const Options& o, std::ostream& out, std::ostream& err) {
  try {
    report::Report rep;
    if (o.command == "converge") {
      if (!o.matrices.empty() || o.gen != "mixed_poisson_1d") {
        throw Error(ErrorCode::SpecInvalid, "converge requires --gen mixed_poisson_1d");
      }
      const Index ref = o.ref > 0 ? o.ref : (o.levels.empty() ? 0 : o.levels.back());
      rep.problem_descriptor = "mixed_poisson_1d hierarchy(ref=" + std::to_string(ref) + ")";
      rep.nv = rep.nq = ref;
      add_convergence(rep, o);
    } else {
      const Input in = load_input(o);
      const SaddleProblem& prob = in.problem;
      rep.problem_descriptor = in.descriptor;
      rep.nv = prob.nv();
      rep.nq = prob.nq();
      if (!prob.has_inf_sup()) {
        rep.constants = report::Constants{0.0, 0.0, prob.kernel_dim(), {}};
        rep.verdicts.push_back(Verdict{"inf_sup_condition", static_cast<double>(prob.rank()),
                                       static_cast<double>(prob.nq()), false, "rank(B) < n_Q, m = 0", true});
      } else {
        const InfSupConstants c = inf_sup_constants(prob);
        rep.constants = report::Constants{c.m, c.M, prob.kernel_dim(), lambda_brackets(c)};
        const bool all = o.command == "analyze";
        if (o.command == "spectrum" || all) add_spectrum(rep, prob, o.tol);
        if (o.command == "stability" || all) add_stability(rep, in, o, o.extremal || all);
        if (all && in.is_mixed_poisson && !o.levels.empty()) add_convergence(rep, o);
      }
    }

    const std::string text = report::to_text(rep);
    out << text;
    if (!o.out.empty()) {
      std::filesystem::create_directories(o.out);
      std::ofstream(std::filesystem::path(o.out) / "report.txt") << text;
      if (!rep.convergence.empty()) {
        std::ofstream(std::filesystem::path(o.out) / "convergence.csv") << report::csv(rep.convergence);
      }
    }
    return rep.pass() ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Spectral, stability and Galerkin verification for symmetric saddle point systems",
               "saddle-verify"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--gen", o.gen, "generator: prescribed | mixed_poisson_1d | random")
        ->check(CLI::IsMember({"prescribed", "mixed_poisson_1d", "random"}));
    sub->add_option("--sv", o.sv, "singular values for the prescribed generator")->delimiter(',');
    sub->add_option("--nv", o.nv, "dim V");
    sub->add_option("--nq", o.nq, "dim Q (random generator)");
    sub->add_option("--n", o.n, "grid cells (mixed_poisson_1d)");
    sub->add_option("--levels", o.levels, "hierarchy levels")->delimiter(',');
    sub->add_option("--ref", o.ref, "reference grid size");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--samples", o.samples, "random data pairs")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", o.tol, "verdict tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--matrices", o.matrices, "directory with A.mtx, B.mtx, C.mtx [, f.txt, g.txt]");
    sub->add_option("--out", o.out, "output directory for report.txt / convergence.csv");
    sub->add_flag("--extremal", o.extremal, "check endpoint attainment with extremal data");
    sub->add_flag("--congruence,!--no-congruence", o.congruence,
                  "apply a random change of basis to prescribed problems");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"spectrum", "spectra of T and T_S0 against the golden-ratio and lambda-bracket predictions"},
      {"stability", "data-to-solution ratios and a priori bounds for random and extremal data"},
      {"converge", "Galerkin error against the quasi-optimality bound on the 1D mixed Poisson hierarchy"},
      {"analyze", "every check in one report"}};
  for (const auto& [name, description] : subs) {
    auto* sub = app.add_subcommand(name, description);
    add_common(sub);
    sub->callback([&o, name] { o.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return execute(o, out, err);
}

}  // namespace saddle::cli
