#pragma once

// Spectra of the block operators
//   T     = [[I, A^{-1}B^T], [C^{-1}B, 0]]        symmetric in a(u,v) + (p,q)
//   T_S0  = [[I, A^{-1}B^T], [S0^{-1}C^{-1}B, 0]]  symmetric in a(u,v) + (S0 p,q)
// realized as the pencils (K, blockdiag(A, C)) and (K, blockdiag(A, S)) with
// K = [[A, B^T], [B, 0]] and S = B A^{-1} B^T.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "saddle/saddle_problem.hpp"
#include "saddle/verdict.hpp"

namespace saddle {

inline constexpr double kGoldenPlus = std::numbers::phi;         // (1 + sqrt 5)/2
inline constexpr double kGoldenMinus = 1.0 - std::numbers::phi;  // (1 - sqrt 5)/2
inline constexpr double kDefaultTolerance = 1e-9;
/// Eigenvalues closer than this times (1 + |l|) form one cluster.
inline constexpr double kClusterTolerance = 1e-7;

/// Roots of l (l - 1) = mu.
inline double lambda_plus(double mu) { return 0.5 * (1.0 + std::sqrt(4.0 * mu + 1.0)); }
inline double lambda_minus(double mu) { return 0.5 * (1.0 - std::sqrt(4.0 * mu + 1.0)); }

struct InfSupConstants {
  double m = 0;
  double M = 0;
  Vector schur_eigenvalues;  // spectrum of (S, C), ascending
};

struct LambdaBrackets {
  double lam_m_minus = 0;
  double lam_m_plus = 0;
  double lam_M_minus = 0;
  double lam_M_plus = 0;
};

struct SpectralReport {
  EigenDecomposition spectrum_T;
  EigenDecomposition spectrum_T_S0;
  Index kernel_dim = 0;
  InfSupConstants constants;
  LambdaBrackets brackets;
  std::vector<Verdict> verdicts;

  bool pass() const { return all_pass(verdicts); }
};

enum class Operator { T, T_S0 };

inline InfSupConstants inf_sup_constants(const SaddleProblem& prob) {
  const SpdGram& s = prob.schur_gram();  // throws SingularSchur
  (void)s;
  InfSupConstants out;
  out.schur_eigenvalues = pencil_eigenvalues(prob.schur(), prob.c());
  out.m = std::sqrt(std::max(0.0, out.schur_eigenvalues.minCoeff()));
  out.M = std::sqrt(std::max(0.0, out.schur_eigenvalues.maxCoeff()));
  return out;
}

inline LambdaBrackets lambda_brackets(double m, double big_m) {
  return LambdaBrackets{lambda_minus(m * m), lambda_plus(m * m), lambda_minus(big_m * big_m),
                        lambda_plus(big_m * big_m)};
}

inline LambdaBrackets lambda_brackets(const InfSupConstants& c) { return lambda_brackets(c.m, c.M); }

inline EigenDecomposition spectrum_T(const SaddleProblem& prob) {
  return sym_generalized_eigs(prob.saddle_matrix(), prob.natural_metric());
}

inline EigenDecomposition spectrum_T_S0(const SaddleProblem& prob) {
  return sym_generalized_eigs(prob.saddle_matrix(), prob.weighted_metric());
}

/// min over unit x (in the operator's own inner product) of |(T - lam) x|.
/// Zero certifies lam as an eigenvalue; otherwise it is the distance from lam
/// to the spectrum.
inline double weyl_residual(const SaddleProblem& prob, double lam, Operator which) {
  const SpdGram metric = which == Operator::T ? prob.natural_metric() : prob.weighted_metric();
  return shifted_min_residual(prob.saddle_matrix(), metric, lam);
}

struct Cluster {
  double center = 0;
  Index count = 0;
};

/// Groups ascending values into clusters of near-equal entries.
inline std::vector<Cluster> cluster_values(const Vector& sorted, double rel = kClusterTolerance) {
  std::vector<Cluster> out;
  double sum = 0;
  for (Index i = 0; i < sorted.size(); ++i) {
    const double v = sorted(i);
    if (!out.empty() && std::abs(v - sorted(i - 1)) <= rel * (1.0 + std::abs(v))) {
      auto& c = out.back();
      sum += v;
      ++c.count;
      c.center = sum / static_cast<double>(c.count);
    } else {
      sum = v;
      out.push_back(Cluster{v, 1});
    }
  }
  return out;
}

inline double distance_to_set(double x, const Vector& set) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < set.size(); ++i) best = std::min(best, std::abs(x - set(i)));
  return best;
}

inline Index count_near(const Vector& values, double target, double tol) {
  Index n = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i) - target) <= tol) ++n;
  }
  return n;
}

/// Checks the finite-dimensional form of the golden-ratio spectrum and the
/// inclusion for T. Every verdict carries its measured value.
inline SpectralReport verify_lemma1(const SaddleProblem& prob, double tol = kDefaultTolerance) {
  SpectralReport rep;
  rep.constants = inf_sup_constants(prob);
  rep.brackets = lambda_brackets(rep.constants);
  rep.kernel_dim = prob.kernel_dim();

  const Matrix k = prob.saddle_matrix();
  const SpdGram natural = prob.natural_metric();
  const SpdGram weighted = prob.weighted_metric();
  rep.spectrum_T = sym_generalized_eigs(k, natural);
  rep.spectrum_T_S0 = sym_generalized_eigs(k, weighted);

  const Vector& sig_t = rep.spectrum_T.eigenvalues;
  const Vector& sig_s = rep.spectrum_T_S0.eigenvalues;
  const Vector& sig_schur = rep.constants.schur_eigenvalues;
  const double big_m2 = rep.constants.M * rep.constants.M;
  const Index nq = prob.nq();
  const Index kd = rep.kernel_dim;
  auto& out = rep.verdicts;

  out.push_back(at_most("pencil_residual", std::max(max_relative_residual(k, natural, rep.spectrum_T),
                                                    max_relative_residual(k, weighted, rep.spectrum_T_S0)),
                        1e-12));

  // (a) sigma(T_S0) within tol of {1 - phi, 1, phi}.
  Vector golden(3);
  golden << kGoldenMinus, 1.0, kGoldenPlus;
  double worst_a = 0;
  for (Index i = 0; i < sig_s.size(); ++i) worst_a = std::max(worst_a, distance_to_set(sig_s(i), golden));
  out.push_back(at_most("golden_membership", worst_a, tol));

  // (b) multiplicities (n_Q, kernel_dim, n_Q).
  const Index c_minus = count_near(sig_s, kGoldenMinus, tol);
  const Index c_one = count_near(sig_s, 1.0, tol);
  const Index c_plus = count_near(sig_s, kGoldenPlus, tol);
  const double mismatch_b = static_cast<double>(std::abs(c_minus - nq) + std::abs(c_one - kd) +
                                                std::abs(c_plus - nq));
  std::string detail_b = "observed (" + std::to_string(c_minus) + "," + std::to_string(c_one) + "," +
                         std::to_string(c_plus) + ") expected (" + std::to_string(nq) + "," +
                         std::to_string(kd) + "," + std::to_string(nq) + ")";
  if (kd == 0) detail_b += "; trivial kernel, two-point spectrum";
  out.push_back(at_most("golden_multiplicities", mismatch_b, 0.0, detail_b));

  // (c) each l in sigma(T): l = 1 or l(l-1) in sigma(S0).
  double worst_c = 0;
  for (Index i = 0; i < sig_t.size(); ++i) {
    const double lam = sig_t(i);
    if (std::abs(lam - 1.0) <= tol) continue;
    worst_c = std::max(worst_c, distance_to_set(lam * (lam - 1.0), sig_schur) / (1.0 + big_m2));
  }
  out.push_back(at_most("quadratic_inclusion", worst_c, tol,
                        "max dist(l(l-1), sigma(S0)) / (1 + M^2) over l != 1"));

  // (d) the bracket values (and 1 when the kernel is nontrivial) are attained.
  std::vector<double> required = {rep.brackets.lam_M_minus, rep.brackets.lam_m_minus,
                                  rep.brackets.lam_m_plus, rep.brackets.lam_M_plus};
  if (kd > 0) required.push_back(1.0);
  double worst_d = 0;
  for (double r : required) worst_d = std::max(worst_d, distance_to_set(r, sig_t));
  out.push_back(at_most("bracket_attainment", worst_d, tol));

  // (e) sigma(T) inside [lM-, lm-] u {1} u [lm+, lM+].
  const auto& br = rep.brackets;
  auto interval_gap = [](double x, double lo, double hi) {
    return x < lo ? lo - x : (x > hi ? x - hi : 0.0);
  };
  double worst_e = 0;
  for (Index i = 0; i < sig_t.size(); ++i) {
    const double lam = sig_t(i);
    const double gap = std::min({interval_gap(lam, br.lam_M_minus, br.lam_m_minus),
                                 std::abs(lam - 1.0), interval_gap(lam, br.lam_m_plus, br.lam_M_plus)});
    worst_e = std::max(worst_e, gap);
  }
  out.push_back(at_most("interval_inclusion", worst_e, tol));

  // Multiplicity accounting: #{l = 1} = kernel_dim and each S0 cluster of
  // multiplicity k is hit by exactly 2k eigenvalues of T (both branches).
  const Index t_one = count_near(sig_t, 1.0, tol);
  out.push_back(at_most("unit_multiplicity", static_cast<double>(std::abs(t_one - kd)), 0.0,
                        "observed " + std::to_string(t_one) + " expected " + std::to_string(kd)));

  const auto clusters = cluster_values(sig_schur);
  std::vector<Index> hits(clusters.size(), 0);
  Index unmatched = 0;
  for (Index i = 0; i < sig_t.size(); ++i) {
    const double lam = sig_t(i);
    if (std::abs(lam - 1.0) <= tol) continue;
    const double mu = lam * (lam - 1.0);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double d = std::abs(mu - clusters[c].center);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    if (best_d <= 1e-8 * (1.0 + big_m2)) {
      ++hits[best];
    } else {
      ++unmatched;
    }
  }
  Index mismatch_q = unmatched;
  for (std::size_t c = 0; c < clusters.size(); ++c) mismatch_q += std::abs(hits[c] - 2 * clusters[c].count);
  out.push_back(at_most("quadratic_map_multiplicity", static_cast<double>(mismatch_q), 0.0,
                        std::to_string(clusters.size()) + " Schur clusters"));

  return rep;
}

}  // namespace saddle
