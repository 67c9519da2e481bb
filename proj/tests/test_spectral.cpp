#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "saddle/problems.hpp"
#include "saddle/spectral.hpp"

using namespace saddle;

namespace {

SaddleProblem hand_problem() {
  Matrix b(1, 2);
  b << 3, 4;
  return SaddleProblem(Matrix::Identity(2, 2), b, Matrix::Identity(1, 1), "hand");
}

SaddleProblem identity_problem(Index n) {
  return SaddleProblem(Matrix::Identity(n, n), Matrix::Identity(n, n), Matrix::Identity(n, n));
}

SaddleProblem prescribed(std::vector<double> sv, Index nv, std::uint64_t seed, bool congruence = true) {
  GeneratorSpec s;
  s.kind = GeneratorKind::Prescribed;
  s.singular_values = std::move(sv);
  s.nv = nv;
  s.seed = seed;
  s.congruence = congruence;
  return generate(s);
}

SaddleProblem random_problem_of(Index nv, Index nq, std::uint64_t seed) {
  GeneratorSpec s;
  s.kind = GeneratorKind::Random;
  s.nv = nv;
  s.nq = nq;
  s.seed = seed;
  return generate(s);
}

Vector oracle_T(const SaddleProblem& p) {
  return oracle::pencil(p.saddle_matrix(), block_diagonal(p.a().matrix(), p.c().matrix()));
}

Vector oracle_T_S0(const SaddleProblem& p) {
  const Matrix s = p.b() * oracle::inverse(p.a().matrix()) * p.b().transpose();
  return oracle::pencil(p.saddle_matrix(), block_diagonal(p.a().matrix(), 0.5 * (s + s.transpose())));
}

void expect_sorted_near(const Vector& got, std::vector<double> want, double tol) {
  std::sort(want.begin(), want.end());
  ASSERT_EQ(got.size(), static_cast<Index>(want.size()));
  for (Index i = 0; i < got.size(); ++i) EXPECT_NEAR(got(i), want[static_cast<std::size_t>(i)], tol) << i;
}

const double kPhi = oracle::phi;

}  // namespace

TEST(InfSup, HandAndIdentity) {
  const InfSupConstants c = inf_sup_constants(hand_problem());
  EXPECT_NEAR(c.m, 5, 1e-14);
  EXPECT_NEAR(c.M, 5, 1e-14);
  const InfSupConstants d = inf_sup_constants(identity_problem(3));
  EXPECT_NEAR(d.m, 1, 1e-14);
  EXPECT_NEAR(d.M, 1, 1e-14);
}

TEST(InfSup, PrescribedGroundTruth) {
  const InfSupConstants c = inf_sup_constants(prescribed({0.5, 2}, 5, 42));
  EXPECT_NEAR(c.m, 0.5, 1e-10);
  EXPECT_NEAR(c.M, 2, 1e-10);
  ASSERT_EQ(c.schur_eigenvalues.size(), 2);
  EXPECT_NEAR(c.schur_eigenvalues(0), 0.25, 1e-10);
  EXPECT_NEAR(c.schur_eigenvalues(1), 4, 1e-10);
}

TEST(InfSup, RankDeficientRaises) {
  Matrix b(2, 3);
  b << 1, 2, 3, 2, 4, 6;
  const SaddleProblem p(Matrix::Identity(3, 3), b, Matrix::Identity(2, 2));
  try {
    inf_sup_constants(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSchur);
  }
  EXPECT_THROW(spectrum_T_S0(p), Error);
  EXPECT_THROW(verify_lemma1(p), Error);
  EXPECT_THROW(weyl_residual(p, 1.0, Operator::T_S0), Error);
  EXPECT_NO_THROW(spectrum_T(p));
}

TEST(Brackets, ClosedForms) {
  const LambdaBrackets a = lambda_brackets(1, 1);
  EXPECT_NEAR(a.lam_m_minus, (1 - std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_NEAR(a.lam_m_plus, (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_EQ(a.lam_m_minus, a.lam_M_minus);
  EXPECT_EQ(a.lam_m_plus, a.lam_M_plus);
  EXPECT_NEAR(a.lam_M_plus, 1.6180339887, 1e-10);
  const LambdaBrackets b = lambda_brackets(5, 5);
  EXPECT_NEAR(b.lam_m_minus, -4.52494, 1e-5);
  EXPECT_NEAR(b.lam_m_plus, 5.52494, 1e-5);
  const LambdaBrackets c = lambda_brackets(0.5, 2);
  EXPECT_NEAR(c.lam_m_minus, (1 - std::sqrt(2.0)) / 2, 1e-15);
  EXPECT_NEAR(c.lam_m_plus, (1 + std::sqrt(2.0)) / 2, 1e-15);
  EXPECT_NEAR(c.lam_M_minus, (1 - std::sqrt(17.0)) / 2, 1e-15);
  EXPECT_NEAR(c.lam_M_plus, (1 + std::sqrt(17.0)) / 2, 1e-15);
  EXPECT_LE(c.lam_M_minus, c.lam_m_minus);
  EXPECT_LT(c.lam_m_minus, 0);
  EXPECT_LT(1, c.lam_m_plus);
  EXPECT_LE(c.lam_m_plus, c.lam_M_plus);
}

TEST(SpectrumT, HandProblem) {
  const Vector s = spectrum_T(hand_problem()).eigenvalues;
  const double r = std::sqrt(101.0);
  expect_sorted_near(s, {1, (1 - r) / 2, (1 + r) / 2}, 1e-12);
  EXPECT_LE((s - oracle_T(hand_problem())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectrumT, IdentityProblemHasNoUnit) {
  const Vector s = spectrum_T(identity_problem(2)).eigenvalues;
  expect_sorted_near(s, {1 - kPhi, 1 - kPhi, kPhi, kPhi}, 1e-12);
}

TEST(SpectrumT, PrescribedClosedForm) {
  const Vector s = spectrum_T(prescribed({0.5, 2}, 4, 9)).eigenvalues;
  const double r2 = std::sqrt(2.0), r17 = std::sqrt(17.0);
  expect_sorted_near(s, {1, 1, (1 - r2) / 2, (1 + r2) / 2, (1 - r17) / 2, (1 + r17) / 2}, 1e-10);
}

TEST(SpectrumTS0, GoldenTriple) {
  const Vector s = spectrum_T_S0(prescribed({0.3, 0.9, 2.5}, 7, 3)).eigenvalues;
  expect_sorted_near(s, {1 - kPhi, 1 - kPhi, 1 - kPhi, 1, 1, 1, 1, kPhi, kPhi, kPhi}, 1e-10);
}

TEST(SpectrumTS0, IdentityTwoPoint) {
  const Vector s = spectrum_T_S0(identity_problem(3)).eigenvalues;
  expect_sorted_near(s, {1 - kPhi, 1 - kPhi, 1 - kPhi, kPhi, kPhi, kPhi}, 1e-12);
}

TEST(SpectrumTS0, HandProblemAgainstOracle) {
  const Vector s = spectrum_T_S0(hand_problem()).eigenvalues;
  expect_sorted_near(s, {-0.6180339887, 1, 1.6180339887}, 1e-10);
  EXPECT_LE((s - oracle_T_S0(hand_problem())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SpectrumTS0, RandomProblemsMatchOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SaddleProblem p = random_problem_of(9, 4, seed);
    EXPECT_LE((spectrum_T(p).eigenvalues - oracle_T(p)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((spectrum_T_S0(p).eigenvalues - oracle_T_S0(p)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(VerifyLemma, AllCasesPass) {
  for (const SaddleProblem& p : {prescribed({0.5, 2}, 5, 11), mixed_poisson_1d(16), hand_problem(),
                                 identity_problem(4), random_problem_of(12, 5, 77)}) {
    const SpectralReport r = verify_lemma1(p, 1e-9);
    for (const auto& v : r.verdicts) EXPECT_TRUE(v.pass) << p.label() << " " << v.name << " " << v.measured;
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.spectrum_T.size(), p.nv() + p.nq());
    EXPECT_EQ(r.spectrum_T_S0.size(), p.nv() + p.nq());
  }
  const SpectralReport mp = verify_lemma1(mixed_poisson_1d(16));
  EXPECT_EQ(mp.kernel_dim, 0);
  const SpectralReport hand = verify_lemma1(hand_problem());
  EXPECT_EQ(hand.kernel_dim, 1);
  EXPECT_EQ(count_near(hand.spectrum_T_S0.eigenvalues, 1.0, 1e-9), 1);
  EXPECT_EQ(count_near(hand.spectrum_T_S0.eigenvalues, kPhi, 1e-9), 1);
  EXPECT_EQ(count_near(hand.spectrum_T_S0.eigenvalues, 1 - kPhi, 1e-9), 1);
}

TEST(VerifyLemma, DetectsWrongMultiplicityClaim) {
  // The checks compare against the spectrum: a perturbed T-spectrum must fail.
  const SaddleProblem p = prescribed({0.5, 2}, 5, 12);
  SpectralReport r = verify_lemma1(p);
  Vector bad = r.spectrum_T.eigenvalues;
  bad(0) += 1e-3;
  EXPECT_GT(distance_to_set(r.brackets.lam_M_minus, bad), 1e-9);
}

TEST(Weyl, CertificatesAndDistances) {
  const SaddleProblem p = prescribed({0.7, 1.3}, 5, 5);
  EXPECT_LE(weyl_residual(p, kPhi, Operator::T_S0), 1e-10);
  EXPECT_LE(weyl_residual(p, 1 - kPhi, Operator::T_S0), 1e-10);
  EXPECT_NEAR(weyl_residual(p, 0.0, Operator::T_S0), kPhi - 1, 1e-8);
  const Vector st = spectrum_T(p).eigenvalues;
  for (Index i = 0; i < st.size(); ++i) EXPECT_LE(weyl_residual(p, st(i), Operator::T), 1e-10);
  const Vector ss = spectrum_T_S0(p).eigenvalues;
  for (Index i = 0; i < ss.size(); ++i) EXPECT_LE(weyl_residual(p, ss(i), Operator::T_S0), 1e-10);
  // 0.3 against the oracle spectrum of T
  const Vector o = oracle_T(p);
  EXPECT_NEAR(weyl_residual(p, 0.3, Operator::T), (o.array() - 0.3).abs().minCoeff(), 1e-8);
}

TEST(Weyl, UnitAwayFromSpectrumWithoutKernel) {
  const SaddleProblem p = mixed_poisson_1d(6);
  ASSERT_EQ(p.kernel_dim(), 0);
  EXPECT_NEAR(weyl_residual(p, 1.0, Operator::T_S0), kPhi - 1, 1e-8);
}

TEST(Properties, QuadraticMapAndMultiplicity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SaddleProblem p = random_problem_of(10, 4, 500 + seed);
    const InfSupConstants c = inf_sup_constants(p);
    const Vector st = spectrum_T(p).eigenvalues;
    Index ones = 0;
    std::vector<double> mus;
    for (Index i = 0; i < st.size(); ++i) {
      if (std::abs(st(i) - 1) <= 1e-9) {
        ++ones;
      } else {
        mus.push_back(st(i) * (st(i) - 1));
      }
    }
    EXPECT_EQ(ones, p.kernel_dim());
    ASSERT_EQ(mus.size(), 2 * static_cast<std::size_t>(p.nq()));
    std::sort(mus.begin(), mus.end());
    for (Index j = 0; j < p.nq(); ++j) {
      const double want = c.schur_eigenvalues(j);
      EXPECT_NEAR(mus[2 * j], want, 1e-8 * (1 + c.M * c.M));
      EXPECT_NEAR(mus[2 * j + 1], want, 1e-8 * (1 + c.M * c.M));
    }
  }
}

TEST(Properties, GoldenRigidityOnRandomProblems) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> nq_dist(1, 12);
  for (int t = 0; t < 100; ++t) {
    const Index nq = nq_dist(rng);
    const Index nv = nq + 1 + (t % 7);
    const SaddleProblem p = random_problem_of(nv, nq, 1000 + t);
    const Vector s = spectrum_T_S0(p).eigenvalues;
    for (Index i = 0; i < s.size(); ++i) {
      const double d = std::min({std::abs(s(i) - kPhi), std::abs(s(i) - 1), std::abs(s(i) - 1 + kPhi)});
      EXPECT_LE(d, 1e-9);
    }
  }
}

TEST(Properties, CongruenceInvariance) {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SaddleProblem p = random_problem_of(8, 3, 40 + seed);
    const SaddleProblem q = congruence_transform(p, random_well_conditioned(8, rng), random_well_conditioned(3, rng));
    EXPECT_LE((spectrum_T(p).eigenvalues - spectrum_T(q).eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((spectrum_T_S0(p).eigenvalues - spectrum_T_S0(q).eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Clusters, GroupingAndCounts) {
  Vector v(6);
  v << -1, -1 + 1e-12, 0.5, 1, 1, 1 + 1e-9;
  const auto c = cluster_values(v);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].count, 2);
  EXPECT_EQ(c[2].count, 3);
  EXPECT_EQ(count_near(v, 1.0, 1e-8), 3);
  EXPECT_NEAR(distance_to_set(0.4, v), 0.1, 1e-15);
}
