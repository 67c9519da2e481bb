#pragma once

// Dense symmetric kernels shared by every other header: SPD Gram matrices,
// SPD solves, and the symmetric-definite generalized eigenproblem K x = l M x.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "saddle/error.hpp"

namespace saddle {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative symmetry tolerance, measured against max|entry|.
inline constexpr double kSymmetryTolerance = 1e-12;
/// Singular values below this fraction of sigma_max count as zero.
inline constexpr double kRankTolerance = 1e-10;

template <class Derived>
double max_abs_entry(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Returns (G + G^T)/2 when G is symmetric within tolerance, throws otherwise.
template <class Derived>
Matrix symmetrize_checked(const Eigen::MatrixBase<Derived>& g, const std::string& what) {
  if (g.rows() != g.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                what + " must be square, got " + std::to_string(g.rows()) + "x" +
                    std::to_string(g.cols()));
  }
  const double scale = max_abs_entry(g);
  const double defect = g.rows() == 0 ? 0.0 : max_abs_entry(g - g.transpose());
  if (defect > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::NotSymmetric,
                what + " asymmetry " + std::to_string(defect) + " exceeds tolerance");
  }
  return 0.5 * (g + g.transpose());
}

/// Coordinate matrix of an inner product with its Cholesky factor, computed
/// once at construction. Immutable afterwards.
class SpdGram {
 public:
  using Factor = Eigen::LLT<Matrix, Eigen::Lower>;

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  const Factor& factor() const noexcept { return factor_; }

  /// Lower-triangular L with matrix() == L L^T.
  Matrix lower() const { return factor_.matrixL(); }

  friend SpdGram spd_factorize(const Matrix& g, const std::string& what);

 private:
  SpdGram(Matrix entries, Factor factor)
      : entries_(std::move(entries)), factor_(std::move(factor)) {}

  Matrix entries_;
  Factor factor_;
};

inline SpdGram spd_factorize(const Matrix& g, const std::string& what = "Gram matrix") {
  Matrix sym = symmetrize_checked(g, what);
  if (sym.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, what + " is empty");
  }
  SpdGram::Factor llt(sym);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, what + " has a non-positive pivot");
  }
  // Eigen only rejects pivots <= 0; a NaN pivot slips through.
  if (!llt.matrixLLT().diagonal().allFinite()) {
    throw Error(ErrorCode::NotPositiveDefinite, what + " has a non-finite pivot");
  }
  return SpdGram(std::move(sym), std::move(llt));
}

/// Solves G x = rhs for a vector or a block of columns.
template <class Derived>
typename Derived::PlainObject spd_solve(const SpdGram& g, const Eigen::MatrixBase<Derived>& rhs) {
  if (rhs.rows() != g.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "rhs has " + std::to_string(rhs.rows()) + " rows, Gram has dim " +
                    std::to_string(g.dim()));
  }
  return g.factor().solve(rhs);
}

/// x^T G^{-1} x, the squared dual norm. Computed as |L^{-1} x|^2 so it is
/// never negative.
inline double dual_norm_squared(const SpdGram& g, const Vector& x) {
  if (x.size() != g.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "dual vector length does not match Gram");
  }
  return g.factor().matrixL().solve(x).squaredNorm();
}

inline double norm_squared(const SpdGram& g, const Vector& x) {
  if (x.size() != g.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vector length does not match Gram");
  }
  const Vector y = g.factor().matrixU() * x;
  return y.squaredNorm();
}

/// Spectrum of a symmetric-definite pencil. Eigenvalues ascending; columns of
/// `eigenvectors` are M-orthonormal, with the first non-negligible component
/// positive.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  Index size() const noexcept { return eigenvalues.size(); }
};

namespace detail {

/// L^{-1} K L^{-T}, symmetrized.
inline Matrix congruence_to_standard(const Matrix& k, const SpdGram& m) {
  const auto l = m.factor().matrixL();
  Matrix y = l.solve(k);                     // L^{-1} K
  Matrix w = l.solve(y.transpose());         // L^{-1} K^T L^{-T}
  return 0.5 * (w + w.transpose());
}

inline void normalize_signs(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double cutoff = 1e-10 * col.cwiseAbs().maxCoeff();
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > cutoff) {
        if (col(i) < 0) col = -col;
        break;
      }
    }
  }
}

inline void check_pencil(const Matrix& k, const SpdGram& m) {
  if (k.rows() != k.cols() || k.rows() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "pencil matrix is " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                    ", metric has dim " + std::to_string(m.dim()));
  }
}

}  // namespace detail

/// Full spectrum of K x = lambda M x by congruence through the Cholesky factor
/// of M.
inline EigenDecomposition sym_generalized_eigs(const Matrix& k, const SpdGram& m) {
  detail::check_pencil(k, m);
  const Matrix w = detail::congruence_to_standard(symmetrize_checked(k, "pencil matrix"), m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w, Eigen::ComputeEigenvectors);
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = m.factor().matrixU().solve(solver.eigenvectors());
  detail::normalize_signs(out.eigenvectors);
  return out;
}

inline Vector pencil_eigenvalues(const Matrix& k, const SpdGram& m) {
  detail::check_pencil(k, m);
  const Matrix w = detail::congruence_to_standard(symmetrize_checked(k, "pencil matrix"), m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// max_i |K x_i - l_i M x_i| / (|K| + |l_i| |M|), spectral norms.
inline double max_relative_residual(const Matrix& k, const SpdGram& m,
                                    const EigenDecomposition& dec) {
  const double norm_k = k.operatorNorm();
  const double norm_m = m.matrix().operatorNorm();
  double worst = 0.0;
  for (Index i = 0; i < dec.size(); ++i) {
    const auto x = dec.eigenvectors.col(i);
    const double lam = dec.eigenvalues(i);
    const double r = (k * x - lam * (m.matrix() * x)).norm();
    worst = std::max(worst, r / ((norm_k + std::abs(lam) * norm_m) * x.norm()));
  }
  return worst;
}

/// min over M-unit x of |M^{-1}(K - shift M) x|_M. For a symmetric pencil this
/// is the smallest |eigenvalue| of L^{-1}(K - shift M)L^{-T}, i.e. the square
/// root of the smallest eigenvalue of ((K - shift M) M^{-1} (K - shift M), M).
inline double shifted_min_residual(const Matrix& k, const SpdGram& m, double shift) {
  detail::check_pencil(k, m);
  Matrix shifted = k - shift * m.matrix();
  const Matrix w = detail::congruence_to_standard(0.5 * (shifted + shifted.transpose()), m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().minCoeff();
}

inline Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

/// Rank with singular values below kRankTolerance * sigma_max treated as zero.
inline Index numerical_rank(const Matrix& a, double relative = kRankTolerance) {
  const Vector sv = singular_values(a);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > relative * sv(0)) ++r;
  }
  return r;
}

inline Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace saddle
