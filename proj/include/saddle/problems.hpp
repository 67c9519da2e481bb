#pragma once

// Seeded test-problem generators: a family with prescribed singular spectrum
// (hence known m, M), a 1D mixed-Poisson discretization with m = M = 1, random
// problems, and nested 1D hierarchies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "saddle/galerkin.hpp"

namespace saddle {

enum class GeneratorKind { Prescribed, MixedPoisson1D, Random };

inline const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Prescribed: return "prescribed";
    case GeneratorKind::MixedPoisson1D: return "mixed_poisson_1d";
    case GeneratorKind::Random: return "random";
  }
  return "?";
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Prescribed;
  std::uint64_t seed = 0;
  Index nv = 0;
  Index nq = 0;
  Index n = 0;  // grid cells, mixed_poisson_1d only
  std::vector<double> singular_values;  // prescribed only
  bool congruence = false;
};

/// Human-readable descriptor, stable across runs.
inline std::string describe(const GeneratorSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(s.kind) << '(';
  switch (s.kind) {
    case GeneratorKind::Prescribed:
      os << "sv=";
      for (std::size_t i = 0; i < s.singular_values.size(); ++i) {
        os << (i ? "," : "") << s.singular_values[i];
      }
      os << ";nv=" << s.nv << ";seed=" << s.seed << ";congruence=" << (s.congruence ? 1 : 0);
      break;
    case GeneratorKind::MixedPoisson1D:
      os << "n=" << s.n;
      break;
    case GeneratorKind::Random:
      os << "nv=" << s.nv << ";nq=" << s.nq << ";seed=" << s.seed;
      break;
  }
  os << ')';
  return os.str();
}

inline void validate(const GeneratorSpec& s) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::SpecInvalid, msg); };
  switch (s.kind) {
    case GeneratorKind::Prescribed:
      if (s.singular_values.empty()) bad("prescribed kind needs singular values");
      for (double v : s.singular_values) {
        if (!(v > 0) || !std::isfinite(v)) bad("singular values must be positive and finite");
      }
      if (s.nv < static_cast<Index>(s.singular_values.size())) bad("n_V must be >= n_Q");
      break;
    case GeneratorKind::MixedPoisson1D:
      if (s.n < 2) bad("mixed_poisson_1d needs n >= 2");
      break;
    case GeneratorKind::Random:
      if (s.nq < 1 || s.nv < s.nq) bad("random kind needs n_V >= n_Q >= 1");
      break;
  }
}

/// Orthogonal matrix from the QR factorization of a seeded Gaussian matrix,
/// columns signed so that R has a positive diagonal.
inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

/// U diag(s) W^T with s uniform in [1, max_condition]; condition number at
/// most max_condition.
inline Matrix random_well_conditioned(Index n, std::mt19937_64& rng, double max_condition = 10.0) {
  const Matrix u = random_orthogonal(n, rng);
  const Matrix w = random_orthogonal(n, rng);
  std::uniform_real_distribution<double> unif(1.0, max_condition);
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = unif(rng);
  if (n > 0) s(0) = 1.0;
  return u * s.asDiagonal() * w.transpose();
}

/// A prescribed-spectrum problem together with the bases that diagonalize it:
/// B v_basis.col(i) pairs with q_basis.col(i) at singular value sv[i], and
/// v_basis.col(j), j >= n_Q, spans ker(B). Both bases are orthonormal in the
/// problem's own Grams.
struct PrescribedInstance {
  SaddleProblem problem;
  Matrix v_basis;
  Matrix q_basis;
  std::vector<double> singular_values;  // ascending
};

inline PrescribedInstance prescribed_instance(const GeneratorSpec& spec) {
  if (spec.kind != GeneratorKind::Prescribed) throw Error(ErrorCode::SpecInvalid, "kind is not prescribed");
  validate(spec);
  std::vector<double> sv = spec.singular_values;
  std::sort(sv.begin(), sv.end());
  const Index nq = static_cast<Index>(sv.size());
  const Index nv = spec.nv;

  std::mt19937_64 rng(spec.seed);
  const Matrix u = random_orthogonal(nq, rng);
  const Matrix w = random_orthogonal(nv, rng);
  Matrix core = Matrix::Zero(nq, nv);
  for (Index i = 0; i < nq; ++i) core(i, i) = sv[static_cast<std::size_t>(i)];
  const Matrix b0 = u * core * w.transpose();

  const std::string label = describe(spec);
  if (!spec.congruence) {
    return PrescribedInstance{SaddleProblem(Matrix::Identity(nv, nv), b0, Matrix::Identity(nq, nq), label),
                              w, u, sv};
  }
  const Matrix pv = random_well_conditioned(nv, rng);
  const Matrix pq = random_well_conditioned(nq, rng);
  SaddleProblem prob(pv.transpose() * pv, pq.transpose() * b0 * pv, pq.transpose() * pq, label);
  Matrix v_basis = pv.partialPivLu().solve(w);
  Matrix q_basis = pq.partialPivLu().solve(u);
  return PrescribedInstance{std::move(prob), std::move(v_basis), std::move(q_basis), sv};
}

/// A = I, C = I, B = U [diag(sigma) | 0] W^T with seeded rotations, optionally
/// followed by a seeded well-conditioned change of basis in V and Q. The
/// Schur pencil spectrum is exactly {sigma_i^2}.
inline SaddleProblem prescribed_problem(const GeneratorSpec& spec) {
  return prescribed_instance(spec).problem;
}

/// Continuous P1 on [0,1] with v(0) = 0 (n nodes) against P0 (n cells):
/// a(u,v) = int u'v', b(v,q) = int v'q, (p,q) = int pq. Since v' sweeps all
/// of P0, the Schur pencil is the identity pencil and m = M = 1.
inline SaddleProblem mixed_poisson_1d(Index n) {
  if (n < 2) throw Error(ErrorCode::SpecInvalid, "mixed_poisson_1d needs n >= 2");
  const double h = 1.0 / static_cast<double>(n);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = (i + 1 < n ? 2.0 : 1.0) / h;
    if (i + 1 < n) {
      a(i, i + 1) = -1.0 / h;
      a(i + 1, i) = -1.0 / h;
    }
  }
  // Cell j = [x_j, x_{j+1}]: int phi_i' over it is delta_{i,j} - delta_{i,j-1}.
  Matrix b = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    b(j, j) = 1.0;
    if (j > 0) b(j, j - 1) = -1.0;
  }
  const Matrix c = h * Matrix::Identity(n, n);
  return SaddleProblem(a, b, c, "mixed_poisson_1d(n=" + std::to_string(n) + ")");
}

/// Gaussian B, and A, C = G^T G / k + I for Gaussian G.
inline SaddleProblem random_problem(const GeneratorSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Index r, Index c) {
    Matrix g(r, c);
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < r; ++i) g(i, j) = normal(rng);
    }
    return g;
  };
  const Matrix ga = gaussian(spec.nv, spec.nv);
  const Matrix gc = gaussian(spec.nq, spec.nq);
  const Matrix b = gaussian(spec.nq, spec.nv);
  const Matrix a = ga.transpose() * ga / static_cast<double>(spec.nv) + Matrix::Identity(spec.nv, spec.nv);
  const Matrix c = gc.transpose() * gc / static_cast<double>(spec.nq) + Matrix::Identity(spec.nq, spec.nq);
  return SaddleProblem(a, b, c, describe(spec));
}

inline SaddleProblem generate(const GeneratorSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case GeneratorKind::Prescribed: return prescribed_problem(spec);
    case GeneratorKind::MixedPoisson1D: return mixed_poisson_1d(spec.n);
    case GeneratorKind::Random: return random_problem(spec);
  }
  throw Error(ErrorCode::SpecInvalid, "unknown generator kind");
}

/// Embedding of the coarse 1D mixed-Poisson pair (n_coarse cells) into the
/// fine one: P1 interpolation for V, piecewise-constant injection for Q.
inline SubspacePair mixed_poisson_embedding(Index n_coarse, Index n_fine) {
  if (n_coarse < 1 || n_fine % n_coarse != 0) {
    throw Error(ErrorCode::NonNestedLevels,
                std::to_string(n_coarse) + " does not divide " + std::to_string(n_fine));
  }
  const Index r = n_fine / n_coarse;
  Matrix pv = Matrix::Zero(n_fine, n_coarse);
  Matrix pq = Matrix::Zero(n_fine, n_coarse);
  for (Index k = 1; k <= n_fine; ++k) {
    for (Index i = 1; i <= n_coarse; ++i) {
      const double offset = std::abs(static_cast<double>(k - i * r)) / static_cast<double>(r);
      pv(k - 1, i - 1) = std::max(0.0, 1.0 - offset);
    }
    pq(k - 1, (k - 1) / r) = 1.0;
  }
  return SubspacePair(std::move(pv), std::move(pq));
}

struct HierarchyLevel {
  Index n = 0;
  SubspacePair pair;
};

struct Hierarchy {
  SaddleProblem finest;
  std::vector<HierarchyLevel> levels;  // coarse to fine; the last is the identity pair
};

/// Levels ascending, each dividing the next; the last level is the ambient
/// problem.
inline Hierarchy refine_hierarchy(GeneratorKind kind, const std::vector<Index>& levels) {
  if (kind != GeneratorKind::MixedPoisson1D) {
    throw Error(ErrorCode::SpecInvalid, std::string("no nested hierarchy for kind ") + to_string(kind));
  }
  if (levels.empty()) throw Error(ErrorCode::NonNestedLevels, "no levels");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1] || levels[i] % levels[i - 1] != 0) {
      throw Error(ErrorCode::NonNestedLevels, std::to_string(levels[i - 1]) + " -> " +
                                                  std::to_string(levels[i]) + " is not a nested refinement");
    }
  }
  const Index fine = levels.back();
  Hierarchy h{mixed_poisson_1d(fine), {}};
  for (Index n : levels) h.levels.push_back(HierarchyLevel{n, mixed_poisson_embedding(n, fine)});
  return h;
}

/// Smooth manufactured solution on the n-cell mixed-Poisson grid:
/// u = sin(3 pi x / 2) sampled at the nodes, p = cell averages of cos(pi x).
/// Data are f = A u + B^T p, g = B u, so (u, p) is the exact discrete solution.
struct Manufactured {
  DataPair data;
  Solution solution;
};

inline Manufactured manufactured_mixed_poisson(const SaddleProblem& prob) {
  const Index n = prob.nv();
  const double h = 1.0 / static_cast<double>(n);
  const double pi = std::numbers::pi;
  Solution s{Vector(n), Vector(n)};
  for (Index k = 0; k < n; ++k) {
    const double x = static_cast<double>(k + 1) * h;
    s.u(k) = std::sin(1.5 * pi * x);
    const double a = static_cast<double>(k) * h;
    s.p(k) = (std::sin(pi * x) - std::sin(pi * a)) / (pi * h);
  }
  DataPair d{prob.a().matrix() * s.u + prob.b().transpose() * s.p, prob.b() * s.u};
  return Manufactured{std::move(d), std::move(s)};
}

}  // namespace saddle
