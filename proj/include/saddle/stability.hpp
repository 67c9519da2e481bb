#pragma once

// Data-to-solution norm ratios in the natural and Schur-weighted metrics,
// their golden-ratio / lambda-bracket placements, the four a priori bounds
// that follow from them, and extremal data attaining the ratio endpoints.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "saddle/spectral.hpp"

namespace saddle {

/// One a priori bound  value <= bound  (upper) or  value >= bound  (lower).
/// `slack` is relative: (bound - value)/bound for upper bounds and
/// (value - bound)/bound for lower bounds, so it is invariant under scaling.
struct BoundCheck {
  std::string name;
  bool upper = true;
  double value = 0;
  double bound = 0;
  double slack = 0;
  bool applicable = true;
  bool pass = false;
};

struct StabilityRecord {
  DataPair data;
  Solution sol;
  NormRecord norms;
  Index kernel_dim = 0;
  double ratio_weighted = 0;
  double ratio_natural = 0;

  bool weighted_in_golden = false;
  // [|l_m^-|, l_M^+]; only guaranteed when the kernel is trivial or m <= sqrt 2,
  // since otherwise 1 in sigma(T) lies below |l_m^-|.
  bool natural_in_bracket = false;
  bool natural_bracket_applicable = true;
  // [min|sigma(T)|, max|sigma(T)|], always valid.
  double natural_sharp_lo = 0;
  double natural_sharp_hi = 0;
  bool natural_in_sharp = false;

  std::array<BoundCheck, 4> corollary{};
  // Lower bound with 2/(sqrt(M^2+1)+1) in place of 2/(sqrt(4M^2+1)+1);
  // informational only, it is violated by extremal data.
  BoundCheck lower_natural_as_printed;

  bool corollary_pass() const {
    for (const auto& b : corollary) {
      if (b.applicable && !b.pass) return false;
    }
    return true;
  }
};

/// Threshold below which data counts as zero, relative to the problem scale.
inline constexpr double kZeroDataTolerance = 1e-14;

/// Sharp natural-ratio interval from the constants: the extremes of |sigma(T)|.
inline std::pair<double, double> natural_sharp_interval(const InfSupConstants& c, Index kernel_dim) {
  const auto br = lambda_brackets(c);
  double lo = std::abs(br.lam_m_minus);
  if (kernel_dim > 0) lo = std::min(lo, 1.0);
  return {lo, br.lam_M_plus};
}

inline bool natural_bracket_applies(const InfSupConstants& c, Index kernel_dim) {
  return kernel_dim == 0 || c.m <= std::numbers::sqrt2;
}

inline StabilityRecord stability_ratios(const SaddleProblem& prob, const DataPair& data,
                                        const InfSupConstants& c, double tol = kDefaultTolerance) {
  prob.check(data);
  const double data_norm = std::sqrt(data.f.squaredNorm() + data.g.squaredNorm());
  if (data_norm <= kZeroDataTolerance * prob.scale()) {
    throw Error(ErrorCode::ZeroData, "data (f, g) vanish; solution is zero");
  }
  StabilityRecord rec;
  rec.data = data;
  rec.sol = solve_saddle(prob, data);
  rec.norms = norms(prob, data, rec.sol);
  rec.kernel_dim = prob.kernel_dim();
  const NormRecord& n = rec.norms;

  rec.ratio_weighted = std::hypot(n.f_dual, n.g_schur_inverse) / std::hypot(n.u_energy, n.p_schur);
  rec.ratio_natural = std::hypot(n.f_dual, n.g_dual) / std::hypot(n.u_energy, n.p_norm);

  rec.weighted_in_golden = rec.ratio_weighted >= -kGoldenMinus - tol &&
                           rec.ratio_weighted <= kGoldenPlus + tol;
  const auto br = lambda_brackets(c);
  rec.natural_bracket_applicable = natural_bracket_applies(c, rec.kernel_dim);
  rec.natural_in_bracket = rec.ratio_natural >= std::abs(br.lam_m_minus) - tol &&
                           rec.ratio_natural <= br.lam_M_plus + tol;
  std::tie(rec.natural_sharp_lo, rec.natural_sharp_hi) = natural_sharp_interval(c, rec.kernel_dim);
  rec.natural_in_sharp = rec.ratio_natural >= rec.natural_sharp_lo - tol &&
                         rec.ratio_natural <= rec.natural_sharp_hi + tol;
  return rec;
}

inline StabilityRecord stability_ratios(const SaddleProblem& prob, const DataPair& data,
                                        double tol = kDefaultTolerance) {
  return stability_ratios(prob, data, inf_sup_constants(prob), tol);
}

namespace detail {

inline BoundCheck make_bound(std::string name, bool upper, double value, double bound,
                             double slack_tol) {
  BoundCheck b;
  b.name = std::move(name);
  b.upper = upper;
  b.value = value;
  b.bound = bound;
  b.slack = (upper ? bound - value : value - bound) / bound;
  b.pass = b.slack >= -slack_tol;
  return b;
}

}  // namespace detail

/// Fills the four corollary checks in `rec`.
inline StabilityRecord corollary_bounds(StabilityRecord rec, const InfSupConstants& c,
                                        double slack_tol = kDefaultTolerance) {
  const NormRecord& n = rec.norms;
  const double m = c.m;
  const double big_m = c.M;
  const double sqrt5 = std::sqrt(5.0);
  const double weighted_sol = std::hypot(n.u_energy, n.p_schur);
  const double natural_sol = std::hypot(n.u_energy, n.p_norm);
  const double natural_data = std::hypot(n.f_dual, n.g_dual);

  rec.corollary[0] = detail::make_bound(
      "weighted_upper", true, weighted_sol,
      2.0 / (sqrt5 - 1.0) * std::hypot(n.f_dual, n.g_dual / m), slack_tol);
  rec.corollary[1] = detail::make_bound(
      "weighted_lower", false, weighted_sol,
      2.0 / (sqrt5 + 1.0) * std::hypot(n.f_dual, n.g_dual / big_m), slack_tol);
  rec.corollary[2] = detail::make_bound(
      "natural_upper", true, natural_sol,
      2.0 / (std::sqrt(4.0 * m * m + 1.0) - 1.0) * natural_data, slack_tol);
  rec.corollary[2].applicable = natural_bracket_applies(c, rec.kernel_dim);
  rec.corollary[3] = detail::make_bound(
      "natural_lower", false, natural_sol,
      2.0 / (std::sqrt(4.0 * big_m * big_m + 1.0) + 1.0) * natural_data, slack_tol);

  rec.lower_natural_as_printed = detail::make_bound(
      "natural_lower_as_printed", false, natural_sol,
      2.0 / (std::sqrt(big_m * big_m + 1.0) + 1.0) * natural_data, slack_tol);
  rec.lower_natural_as_printed.applicable = false;
  return rec;
}

enum class ExtremalTarget { WeightedMax, WeightedMin, NaturalMax, NaturalMin };

inline const char* to_string(ExtremalTarget t) {
  switch (t) {
    case ExtremalTarget::WeightedMax: return "weighted_max";
    case ExtremalTarget::WeightedMin: return "weighted_min";
    case ExtremalTarget::NaturalMax: return "natural_max";
    case ExtremalTarget::NaturalMin: return "natural_min";
  }
  return "?";
}

/// Data whose solution is the eigenvector x at the extreme |eigenvalue| of the
/// relevant pencil: (f; g) = K x, so the data-to-solution ratio is |l|.
inline DataPair extremal_data(const SaddleProblem& prob, ExtremalTarget target) {
  const bool weighted = target == ExtremalTarget::WeightedMax || target == ExtremalTarget::WeightedMin;
  const bool want_max = target == ExtremalTarget::WeightedMax || target == ExtremalTarget::NaturalMax;
  const EigenDecomposition dec = weighted ? spectrum_T_S0(prob) : spectrum_T(prob);
  Index pick = 0;
  for (Index i = 1; i < dec.size(); ++i) {
    const double a = std::abs(dec.eigenvalues(i));
    const double b = std::abs(dec.eigenvalues(pick));
    if (want_max ? a > b : a < b) pick = i;
  }
  const Vector y = prob.saddle_matrix() * dec.eigenvectors.col(pick);
  return DataPair{y.head(prob.nv()), y.tail(prob.nq())};
}

/// Standard-normal coordinates for (f, g).
inline DataPair random_data_pair(const SaddleProblem& prob, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DataPair d{Vector(prob.nv()), Vector(prob.nq())};
  for (Index i = 0; i < d.f.size(); ++i) d.f(i) = normal(rng);
  for (Index i = 0; i < d.g.size(); ++i) d.g(i) = normal(rng);
  return d;
}

struct Endpoint {
  ExtremalTarget target = ExtremalTarget::WeightedMax;
  double ratio = 0;
  double expected = 0;
  double error = 0;
};

struct StabilitySummary {
  Index samples = 0;
  double weighted_min = std::numeric_limits<double>::infinity();
  double weighted_max = -std::numeric_limits<double>::infinity();
  double natural_min = std::numeric_limits<double>::infinity();
  double natural_max = -std::numeric_limits<double>::infinity();
  double natural_sharp_lo = 0;
  double natural_sharp_hi = 0;
  double natural_bracket_lo = 0;  // |l_m^-|
  double natural_bracket_hi = 0;  // l_M^+
  bool natural_bracket_applicable = true;
  std::array<double, 4> corollary_min_slack{};
  double lower_as_printed_min_slack = std::numeric_limits<double>::infinity();
  Index weighted_violations = 0;
  Index natural_bracket_violations = 0;
  Index natural_sharp_violations = 0;
  Index corollary_violations = 0;
  std::vector<Endpoint> endpoints;
};

/// Ratios and corollary slacks over `samples` random data pairs drawn from
/// `seed`; endpoints from extremal data when `extremal` is set.
inline StabilitySummary stability_batch(const SaddleProblem& prob, Index samples, std::uint64_t seed,
                                        bool extremal, double tol = kDefaultTolerance) {
  const InfSupConstants c = inf_sup_constants(prob);
  StabilitySummary s;
  s.samples = samples;
  std::tie(s.natural_sharp_lo, s.natural_sharp_hi) = natural_sharp_interval(c, prob.kernel_dim());
  const auto br = lambda_brackets(c);
  s.natural_bracket_lo = std::abs(br.lam_m_minus);
  s.natural_bracket_hi = br.lam_M_plus;
  s.natural_bracket_applicable = natural_bracket_applies(c, prob.kernel_dim());
  s.corollary_min_slack.fill(std::numeric_limits<double>::infinity());

  std::mt19937_64 rng(seed);
  for (Index k = 0; k < samples; ++k) {
    const StabilityRecord rec = corollary_bounds(stability_ratios(prob, random_data_pair(prob, rng), c, tol), c, tol);
    s.weighted_min = std::min(s.weighted_min, rec.ratio_weighted);
    s.weighted_max = std::max(s.weighted_max, rec.ratio_weighted);
    s.natural_min = std::min(s.natural_min, rec.ratio_natural);
    s.natural_max = std::max(s.natural_max, rec.ratio_natural);
    if (!rec.weighted_in_golden) ++s.weighted_violations;
    if (!rec.natural_in_bracket) ++s.natural_bracket_violations;
    if (!rec.natural_in_sharp) ++s.natural_sharp_violations;
    if (!rec.corollary_pass()) ++s.corollary_violations;
    for (std::size_t i = 0; i < 4; ++i) {
      s.corollary_min_slack[i] = std::min(s.corollary_min_slack[i], rec.corollary[i].slack);
    }
    s.lower_as_printed_min_slack = std::min(s.lower_as_printed_min_slack, rec.lower_natural_as_printed.slack);
  }

  if (extremal) {
    const std::array<std::pair<ExtremalTarget, double>, 4> targets = {{
        {ExtremalTarget::WeightedMax, kGoldenPlus},
        {ExtremalTarget::WeightedMin, -kGoldenMinus},
        {ExtremalTarget::NaturalMax, s.natural_sharp_hi},
        {ExtremalTarget::NaturalMin, s.natural_sharp_lo},
    }};
    for (const auto& [target, expected] : targets) {
      const StabilityRecord rec = stability_ratios(prob, extremal_data(prob, target), c, tol);
      const bool weighted = target == ExtremalTarget::WeightedMax || target == ExtremalTarget::WeightedMin;
      const double ratio = weighted ? rec.ratio_weighted : rec.ratio_natural;
      s.endpoints.push_back(Endpoint{target, ratio, expected, std::abs(ratio - expected)});
    }
  }
  return s;
}

}  // namespace saddle
