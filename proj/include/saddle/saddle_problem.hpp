#pragma once

// The saddle system  A u + B^T p = f,  B u = g  with Gram matrices A (on V)
// and C (on Q). Dual vectors f, g are coordinate vectors in the same bases;
// the Grams mediate every pairing.

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "saddle/linalg.hpp"

namespace saddle {

struct DataPair {
  Vector f;
  Vector g;
};

struct Solution {
  Vector u;
  Vector p;
};

class SaddleProblem {
 public:
  SaddleProblem(const Matrix& a, const Matrix& b, const Matrix& c, std::string label = {})
      : a_(spd_factorize(a, "A")), c_(spd_factorize(c, "C")), b_(b), label_(std::move(label)) {
    if (b_.rows() != c_.dim() || b_.cols() != a_.dim()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "B is " + std::to_string(b_.rows()) + "x" + std::to_string(b_.cols()) +
                      ", expected " + std::to_string(c_.dim()) + "x" + std::to_string(a_.dim()));
    }
    rank_ = numerical_rank(b_);
    const Matrix ainv_bt = spd_solve(a_, Matrix(b_.transpose()));
    const Matrix s = b_ * ainv_bt;
    schur_ = 0.5 * (s + s.transpose());
    if (rank_ == nq()) {
      try {
        schur_gram_.emplace(spd_factorize(schur_, "Schur complement"));
      } catch (const Error&) {
        // Numerically full rank but too ill-conditioned to factor.
        rank_ = nq() - 1;
      }
    }
  }

  Index nv() const noexcept { return a_.dim(); }
  Index nq() const noexcept { return c_.dim(); }
  const SpdGram& a() const noexcept { return a_; }
  const SpdGram& c() const noexcept { return c_; }
  const Matrix& b() const noexcept { return b_; }
  const std::string& label() const noexcept { return label_; }

  Index rank() const noexcept { return rank_; }
  Index kernel_dim() const noexcept { return nv() - rank_; }
  /// rank(B) == n_Q, i.e. m > 0.
  bool has_inf_sup() const noexcept { return schur_gram_.has_value(); }

  /// B A^{-1} B^T.
  const Matrix& schur() const noexcept { return schur_; }

  const SpdGram& schur_gram() const {
    if (!schur_gram_) {
      throw Error(ErrorCode::SingularSchur,
                  "rank(B) = " + std::to_string(rank_) + " < n_Q = " + std::to_string(nq()));
    }
    return *schur_gram_;
  }

  /// [[A, B^T], [B, 0]].
  Matrix saddle_matrix() const {
    Matrix k = Matrix::Zero(nv() + nq(), nv() + nq());
    k.topLeftCorner(nv(), nv()) = a_.matrix();
    k.topRightCorner(nv(), nq()) = b_.transpose();
    k.bottomLeftCorner(nq(), nv()) = b_;
    return k;
  }

  /// blockdiag(A, C): the product inner product a(u,v) + (p,q).
  SpdGram natural_metric() const {
    return spd_factorize(block_diagonal(a_.matrix(), c_.matrix()), "natural metric");
  }

  /// blockdiag(A, B A^{-1} B^T): the Schur-weighted product inner product.
  SpdGram weighted_metric() const {
    return spd_factorize(block_diagonal(a_.matrix(), schur_gram().matrix()), "weighted metric");
  }

  /// max |entry| over A, B, C.
  double scale() const {
    return std::max({max_abs_entry(a_.matrix()), max_abs_entry(b_), max_abs_entry(c_.matrix())});
  }

  void check(const DataPair& d) const {
    if (d.f.size() != nv() || d.g.size() != nq()) {
      throw Error(ErrorCode::DimensionMismatch, "data lengths do not match problem");
    }
  }
  void check(const Solution& s) const {
    if (s.u.size() != nv() || s.p.size() != nq()) {
      throw Error(ErrorCode::DimensionMismatch, "solution lengths do not match problem");
    }
  }

 private:
  SpdGram a_;
  SpdGram c_;
  Matrix b_;
  std::string label_;
  Index rank_ = 0;
  Matrix schur_;
  std::optional<SpdGram> schur_gram_;
};

/// Coordinate matrix of the Schur complement; the operator C^{-1} B A^{-1} B^T
/// is the pencil (schur_matrix, C).
inline Matrix schur_matrix(const SaddleProblem& prob) { return prob.schur(); }

/// Riesz map A^{-1}: V* -> V.
inline Vector riesz_v(const SaddleProblem& prob, const Vector& f) { return spd_solve(prob.a(), f); }

/// Riesz map C^{-1}: Q* -> Q.
inline Vector riesz_q(const SaddleProblem& prob, const Vector& g) { return spd_solve(prob.c(), g); }

/// |(C^{-1} B v, q) - a(v, A^{-1} B^T q)|, computed through the two Riesz maps.
inline double symmetry_defect(const SaddleProblem& prob, const Vector& v, const Vector& q) {
  const Vector cb = riesz_q(prob, prob.b() * v);
  const Vector ab = riesz_v(prob, prob.b().transpose() * q);
  const double lhs = q.dot(prob.c().matrix() * cb);
  const double rhs = v.dot(prob.a().matrix() * ab);
  return std::abs(lhs - rhs);
}

/// |A^{-1} B^T p|_V, which equals |p|_{S0}.
inline double lifted_norm(const SaddleProblem& prob, const Vector& p) {
  return std::sqrt(norm_squared(prob.a(), riesz_v(prob, prob.b().transpose() * p)));
}

struct NormRecord {
  double f_dual = 0;           // |f|_{V*}
  double g_dual = 0;           // |g|_{Q*}
  double g_schur_inverse = 0;  // |C^{-1} g|_{S0^{-1}} = sqrt(g^T S^{-1} g)
  double u_energy = 0;         // |u|_V
  double p_norm = 0;           // |p|_Q
  double p_schur = 0;          // |p|_{S0}
};

inline NormRecord norms(const SaddleProblem& prob, const DataPair& data, const Solution& sol) {
  prob.check(data);
  prob.check(sol);
  const SpdGram& s = prob.schur_gram();
  NormRecord r;
  r.f_dual = std::sqrt(dual_norm_squared(prob.a(), data.f));
  r.g_dual = std::sqrt(dual_norm_squared(prob.c(), data.g));
  r.g_schur_inverse = std::sqrt(dual_norm_squared(s, data.g));
  r.u_energy = std::sqrt(norm_squared(prob.a(), sol.u));
  r.p_norm = std::sqrt(norm_squared(prob.c(), sol.p));
  r.p_schur = std::sqrt(norm_squared(s, sol.p));
  return r;
}

/// Direct solve by Schur elimination:
///   (B A^{-1} B^T) p = B A^{-1} f - g,   A u = f - B^T p.
/// Columns of (F; G) are solved independently.
inline std::pair<Matrix, Matrix> solve_saddle_columns(const SaddleProblem& prob, const Matrix& f,
                                                      const Matrix& g) {
  if (f.rows() != prob.nv() || g.rows() != prob.nq() || f.cols() != g.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "data block shape does not match problem");
  }
  const SpdGram& s = prob.schur_gram();
  const Matrix ainv_f = spd_solve(prob.a(), f);
  Matrix p = spd_solve(s, Matrix(prob.b() * ainv_f - g));
  Matrix u = spd_solve(prob.a(), Matrix(f - prob.b().transpose() * p));
  return {std::move(u), std::move(p)};
}

inline Solution solve_saddle(const SaddleProblem& prob, const DataPair& data) {
  prob.check(data);
  const SpdGram& s = prob.schur_gram();
  const Vector ainv_f = spd_solve(prob.a(), data.f);
  Solution sol;
  sol.p = spd_solve(s, Vector(prob.b() * ainv_f - data.g));
  sol.u = spd_solve(prob.a(), Vector(data.f - prob.b().transpose() * sol.p));
  return sol;
}

/// |K (u;p) - (f;g)| / |(f;g)| in Euclidean coordinates; the absolute residual
/// when the data vanish.
inline double block_residual(const SaddleProblem& prob, const DataPair& data, const Solution& sol) {
  prob.check(data);
  prob.check(sol);
  const Vector r1 = prob.a().matrix() * sol.u + prob.b().transpose() * sol.p - data.f;
  const Vector r2 = prob.b() * sol.u - data.g;
  const double res = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
  const double rhs = std::sqrt(data.f.squaredNorm() + data.g.squaredNorm());
  return rhs > 0 ? res / rhs : res;
}

/// (P^T A P, Q^T B P, Q^T C Q): the same abstract problem in new bases.
inline SaddleProblem congruence_transform(const SaddleProblem& prob, const Matrix& pv,
                                          const Matrix& pq, std::string label = {}) {
  if (pv.rows() != prob.nv() || pq.rows() != prob.nq()) {
    throw Error(ErrorCode::DimensionMismatch, "change of basis has wrong row count");
  }
  return SaddleProblem(pv.transpose() * prob.a().matrix() * pv, pq.transpose() * prob.b() * pv,
                       pq.transpose() * prob.c().matrix() * pq,
                       label.empty() ? prob.label() : std::move(label));
}

inline Vector stack(const Vector& top, const Vector& bottom) {
  Vector out(top.size() + bottom.size());
  out << top, bottom;
  return out;
}

}  // namespace saddle
