#pragma once

// Galerkin restriction to subspaces V_h x M_h given by prolongations, the
// discrete inf-sup constant, the quasi-optimality constants C_h and D_h, and
// the projection-norm identity |Pi| = |I - Pi|.

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "saddle/spectral.hpp"

namespace saddle {

/// Prolongations of V_h into V (n_V x k_V) and of M_h into Q (n_Q x k_Q), both
/// of full column rank.
class SubspacePair {
 public:
  SubspacePair(Matrix pv, Matrix pq) : pv_(std::move(pv)), pq_(std::move(pq)) {
    check_full_rank(pv_, "P_V");
    check_full_rank(pq_, "P_Q");
  }

  /// The whole ambient space.
  static SubspacePair identity(const SaddleProblem& prob) {
    return SubspacePair(Matrix::Identity(prob.nv(), prob.nv()), Matrix::Identity(prob.nq(), prob.nq()));
  }

  const Matrix& pv() const noexcept { return pv_; }
  const Matrix& pq() const noexcept { return pq_; }
  Index kv() const noexcept { return pv_.cols(); }
  Index kq() const noexcept { return pq_.cols(); }

  /// blockdiag(P_V, P_Q).
  Matrix prolongation() const { return block_diagonal(pv_, pq_); }

  void check(const SaddleProblem& prob) const {
    if (pv_.rows() != prob.nv() || pq_.rows() != prob.nq()) {
      throw Error(ErrorCode::DimensionMismatch, "prolongation rows do not match problem");
    }
  }

 private:
  static void check_full_rank(const Matrix& p, const char* what) {
    if (p.cols() == 0 || p.cols() > p.rows() || numerical_rank(p) != p.cols()) {
      throw Error(ErrorCode::RankDeficientProlongation,
                  std::string(what) + " (" + std::to_string(p.rows()) + "x" +
                      std::to_string(p.cols()) + ") lacks full column rank");
    }
  }

  Matrix pv_;
  Matrix pq_;
};

/// (P_V^T A P_V, P_Q^T B P_V, P_Q^T C P_Q).
inline SaddleProblem restrict_problem(const SaddleProblem& prob, const SubspacePair& pair) {
  pair.check(prob);
  return congruence_transform(prob, pair.pv(), pair.pq(), prob.label() + "|restricted");
}

struct DiscreteInfSup {
  double m_h = 0;
  bool stable = false;  // rank(B_h) == k_Q
};

inline DiscreteInfSup discrete_inf_sup(const SaddleProblem& restricted) {
  if (!restricted.has_inf_sup()) return DiscreteInfSup{0.0, false};
  return DiscreteInfSup{inf_sup_constants(restricted).m, true};
}

/// m_h; an unstable pair yields {0, false} rather than an error.
inline DiscreteInfSup discrete_inf_sup(const SaddleProblem& prob, const SubspacePair& pair) {
  return discrete_inf_sup(restrict_problem(prob, pair));
}

/// C_h = (sqrt(4M^2+1)+1) / (sqrt(4m_h^2+1)-1).
inline double quasi_optimality_constant(double big_m, double m_h) {
  if (m_h <= 0) return std::numeric_limits<double>::infinity();
  return (std::sqrt(4 * big_m * big_m + 1) + 1) / (std::sqrt(4 * m_h * m_h + 1) - 1);
}

/// D_h = ((sqrt(4M^2/m_h^2+1)+1)/2) * 2/(sqrt 5 - 1).
inline double weighted_quasi_optimality_constant(double big_m, double m_h) {
  if (m_h <= 0) return std::numeric_limits<double>::infinity();
  const double r = big_m / m_h;
  return 0.5 * (std::sqrt(4 * r * r + 1) + 1) * 2 / (std::sqrt(5.0) - 1);
}

/// Continuity constant M and |T| = max|sigma(T)| of the ambient problem;
/// shared by every level of a hierarchy.
struct AmbientConstants {
  double M = 0;
  double M_B = 0;
};

inline AmbientConstants ambient_constants(const SaddleProblem& prob) {
  const Vector sig = pencil_eigenvalues(prob.saddle_matrix(), prob.natural_metric());
  return AmbientConstants{inf_sup_constants(prob).M, sig.cwiseAbs().maxCoeff()};
}

struct XZConstants {
  double M_B = 0;   // max|sigma(T)|, ambient
  double m_Bh = 0;  // min|sigma(T_h)|, restricted
  double C_h = 0;
  double D_h = 0;
  double m_h = 0;
  double M = 0;
  bool stable = false;
  Index kernel_dim_h = 0;
  double M_B_formula = 0;   // (sqrt(4M^2+1)+1)/2
  double m_Bh_formula = 0;  // (sqrt(4m_h^2+1)-1)/2
  /// The minimum of |sigma(T_h)| lies on the l^- branch, not at 1 from ker(B_h).
  bool m_Bh_on_branch = true;
};

inline XZConstants xz_constants(const AmbientConstants& ambient, const SaddleProblem& restricted) {
  XZConstants x;
  x.M = ambient.M;
  x.M_B = ambient.M_B;
  x.M_B_formula = lambda_plus(ambient.M * ambient.M);
  const DiscreteInfSup dis = discrete_inf_sup(restricted);
  x.m_h = dis.m_h;
  x.stable = dis.stable;
  x.kernel_dim_h = restricted.kernel_dim();
  const Vector sig_h = pencil_eigenvalues(restricted.saddle_matrix(), restricted.natural_metric());
  x.m_Bh = sig_h.cwiseAbs().minCoeff();
  x.m_Bh_formula = -lambda_minus(x.m_h * x.m_h);
  x.m_Bh_on_branch = x.kernel_dim_h == 0 || x.m_Bh_formula <= 1.0;
  x.C_h = quasi_optimality_constant(x.M, x.m_h);
  x.D_h = weighted_quasi_optimality_constant(x.M, x.m_h);
  return x;
}

inline XZConstants xz_constants(const SaddleProblem& prob, const SubspacePair& pair) {
  return xz_constants(ambient_constants(prob), restrict_problem(prob, pair));
}

/// Solves the restricted system with data (P_V^T f, P_Q^T g) and returns
/// (P_V u_h, P_Q p_h) in ambient coordinates.
inline Solution galerkin_solve(const SaddleProblem& prob, const SaddleProblem& restricted,
                               const SubspacePair& pair, const DataPair& data) {
  prob.check(data);
  if (!restricted.has_inf_sup()) {
    throw Error(ErrorCode::NotInfSupDiscrete, "rank(B_h) < dim M_h");
  }
  const Solution sol_h =
      solve_saddle(restricted, DataPair{pair.pv().transpose() * data.f, pair.pq().transpose() * data.g});
  return Solution{pair.pv() * sol_h.u, pair.pq() * sol_h.p};
}

inline Solution galerkin_solve(const SaddleProblem& prob, const SubspacePair& pair,
                               const DataPair& data) {
  return galerkin_solve(prob, restrict_problem(prob, pair), pair, data);
}

/// Dual norm (in the restricted natural metric) of P^T (K x_h - (f;g)): zero
/// up to rounding when x_h is the Galerkin solution.
inline double galerkin_orthogonality_defect(const SaddleProblem& prob, const SaddleProblem& restricted,
                                            const SubspacePair& pair, const DataPair& data,
                                            const Solution& lifted) {
  const Vector r = pair.prolongation().transpose() *
                   (prob.saddle_matrix() * stack(lifted.u, lifted.p) - stack(data.f, data.g));
  return std::sqrt(dual_norm_squared(restricted.natural_metric(), r));
}

/// A-orthogonal projection of u onto range(P_V) and C-orthogonal projection of
/// p onto range(P_Q), in ambient coordinates.
inline Solution orthogonal_projection(const SaddleProblem& restricted, const SubspacePair& pair,
                                      const SaddleProblem& prob, const Solution& sol) {
  const Vector cu = spd_solve(restricted.a(), Vector(pair.pv().transpose() * (prob.a().matrix() * sol.u)));
  const Vector cp = spd_solve(restricted.c(), Vector(pair.pq().transpose() * (prob.c().matrix() * sol.p)));
  return Solution{pair.pv() * cu, pair.pq() * cp};
}

struct BestApproximation {
  double best_u = 0;  // inf over V_h of |u - v_h|_V
  double best_p = 0;  // inf over M_h of |p - q_h|_Q
};

inline BestApproximation best_approximation(const SaddleProblem& prob, const SaddleProblem& restricted,
                                            const SubspacePair& pair, const Solution& sol) {
  prob.check(sol);
  const Solution proj = orthogonal_projection(restricted, pair, prob, sol);
  return BestApproximation{std::sqrt(norm_squared(prob.a(), Vector(sol.u - proj.u))),
                           std::sqrt(norm_squared(prob.c(), Vector(sol.p - proj.p)))};
}

inline BestApproximation best_approximation(const SaddleProblem& prob, const SubspacePair& pair,
                                            const Solution& sol) {
  return best_approximation(prob, restrict_problem(prob, pair), pair, sol);
}

struct ConvergenceRecord {
  long level = 0;
  double m_h = 0;
  double C_h = 0;
  double D_h = 0;
  double error_u = 0;
  double error_p = 0;
  double best_u = 0;
  double best_p = 0;
  double lhs = 0;  // |u-u_h|^2 + |p-p_h|^2
  double rhs = 0;  // C_h^2 (best_u^2 + best_p^2)
  double effective_constant = 0;  // sqrt(lhs / (best_u^2 + best_p^2))
  double weighted_lhs = 0;        // |u-u_h|^2 + m_h^2 |p-p_h|^2
  double weighted_rhs = 0;        // D_h^2 (best_u^2 + m_h^2 best_p^2)
  double split_u_constant = 0;    // |u-u_h| / (best_u/m_h + best_p)
  double split_p_constant = 0;    // |p-p_h| / (best_u/m_h^2 + best_p/m_h)
  double scale = 0;               // |u|^2 + |p|^2
  bool bound_holds = false;
  bool weighted_bound_holds = false;
};

inline constexpr double kBoundSlack = 1e-9;

/// Galerkin error against the quasi-optimality bounds with precomputed
/// constants and reference solution.
inline ConvergenceRecord verify_error_bound(const SaddleProblem& prob, const SaddleProblem& restricted,
                                            const SubspacePair& pair, const DataPair& data,
                                            const Solution& reference, const XZConstants& xz,
                                            long level = 0) {
  if (!xz.stable) throw Error(ErrorCode::NotInfSupDiscrete, "m_h = 0, error bound undefined");
  const Solution approx = galerkin_solve(prob, restricted, pair, data);
  const BestApproximation best = best_approximation(prob, restricted, pair, reference);

  ConvergenceRecord r;
  r.level = level;
  r.m_h = xz.m_h;
  r.C_h = xz.C_h;
  r.D_h = xz.D_h;
  r.error_u = std::sqrt(norm_squared(prob.a(), Vector(reference.u - approx.u)));
  r.error_p = std::sqrt(norm_squared(prob.c(), Vector(reference.p - approx.p)));
  r.best_u = best.best_u;
  r.best_p = best.best_p;
  const double best_sq = r.best_u * r.best_u + r.best_p * r.best_p;
  const double mh2 = r.m_h * r.m_h;
  r.lhs = r.error_u * r.error_u + r.error_p * r.error_p;
  r.rhs = r.C_h * r.C_h * best_sq;
  r.effective_constant = best_sq > 0 ? std::sqrt(r.lhs / best_sq) : 0.0;
  r.weighted_lhs = r.error_u * r.error_u + mh2 * r.error_p * r.error_p;
  r.weighted_rhs = r.D_h * r.D_h * (r.best_u * r.best_u + mh2 * r.best_p * r.best_p);
  const double du = r.best_u / r.m_h + r.best_p;
  const double dp = r.best_u / mh2 + r.best_p / r.m_h;
  r.split_u_constant = du > 0 ? r.error_u / du : 0.0;
  r.split_p_constant = dp > 0 ? r.error_p / dp : 0.0;
  r.scale = norm_squared(prob.a(), reference.u) + norm_squared(prob.c(), reference.p);
  r.bound_holds = r.lhs <= r.rhs + kBoundSlack * r.scale;
  r.weighted_bound_holds = r.weighted_lhs <= r.weighted_rhs + kBoundSlack * r.scale;
  return r;
}

inline ConvergenceRecord verify_error_bound(const SaddleProblem& prob, const SubspacePair& pair,
                                            const DataPair& data, long level = 0) {
  const SaddleProblem restricted = restrict_problem(prob, pair);
  const XZConstants xz = xz_constants(ambient_constants(prob), restricted);
  if (!xz.stable) throw Error(ErrorCode::NotInfSupDiscrete, "m_h = 0, error bound undefined");
  return verify_error_bound(prob, restricted, pair, data, solve_saddle(prob, data), xz, level);
}

struct KatoRecord {
  double norm_P = 0;
  double norm_I_minus_P = 0;
  double idempotency_residual = 0;
};

/// Matrix of the Galerkin projection Pi x = x_h, B(x_h, z_h) = B(x, z_h) for
/// z_h in X_h:  Pi = P (P^T K P)^{-1} P^T K.
inline Matrix galerkin_projection(const SaddleProblem& prob, const SaddleProblem& restricted,
                                  const SubspacePair& pair) {
  if (!restricted.has_inf_sup()) {
    throw Error(ErrorCode::NotInfSupDiscrete, "rank(B_h) < dim M_h");
  }
  const Matrix k = prob.saddle_matrix();
  const Matrix pk = pair.prolongation().transpose() * k;
  auto [yu, yp] = solve_saddle_columns(restricted, pk.topRows(pair.kv()), pk.bottomRows(pair.kq()));
  Matrix y(pair.kv() + pair.kq(), k.cols());
  y << yu, yp;
  return pair.prolongation() * y;
}

/// Operator norm of X in the metric M: sqrt of the top eigenvalue of (X^T M X, M).
inline double metric_operator_norm(const Matrix& x, const SpdGram& metric) {
  Matrix g = x.transpose() * (metric.matrix() * x);
  g = 0.5 * (g + g.transpose());
  return std::sqrt(std::max(0.0, pencil_eigenvalues(g, metric).maxCoeff()));
}

inline KatoRecord kato_projection_check(const SaddleProblem& prob, const SubspacePair& pair) {
  pair.check(prob);
  if (pair.kv() == prob.nv() && pair.kq() == prob.nq()) {
    throw Error(ErrorCode::TrivialProjection, "subspace is the whole space, Pi = I");
  }
  const SaddleProblem restricted = restrict_problem(prob, pair);
  const Matrix pi = galerkin_projection(prob, restricted, pair);
  const SpdGram metric = prob.natural_metric();
  const Matrix id = Matrix::Identity(pi.rows(), pi.cols());
  KatoRecord r;
  r.norm_P = metric_operator_norm(pi, metric);
  r.norm_I_minus_P = metric_operator_norm(id - pi, metric);
  r.idempotency_residual = metric_operator_norm(pi * pi - pi, metric);
  return r;
}

}  // namespace saddle
