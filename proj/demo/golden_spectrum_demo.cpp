// Builds a prescribed saddle point problem, prints the spectra of the
// natural-norm operator T and the Schur-weighted operator T_S0, and shows
// that T_S0 only ever has eigenvalues phi, 1 - phi and 1.

#include <iomanip>
#include <iostream>

#include "saddle/problems.hpp"
#include "saddle/spectral.hpp"

int main() {
  using namespace saddle;
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Prescribed;
  spec.seed = 7;
  spec.nv = 6;
  spec.singular_values = {0.5, 1.0, 2.0};
  spec.congruence = true;
  const SaddleProblem prob = generate(spec);

  const InfSupConstants c = inf_sup_constants(prob);
  const LambdaBrackets br = lambda_brackets(c);
  std::cout << std::setprecision(12);
  std::cout << describe(spec) << "\n";
  std::cout << "m = " << c.m << ", M = " << c.M << ", dim ker B = " << prob.kernel_dim() << "\n\n";

  std::cout << "sigma(T):    ";
  for (double v : spectrum_T(prob).eigenvalues) std::cout << v << ' ';
  std::cout << "\nbrackets:    [" << br.lam_M_minus << ", " << br.lam_m_minus << "] and [" << br.lam_m_plus << ", "
            << br.lam_M_plus << "]\n\n";

  std::cout << "sigma(T_S0): ";
  for (double v : spectrum_T_S0(prob).eigenvalues) std::cout << v << ' ';
  std::cout << "\nphi = " << kGoldenPlus << ", 1 - phi = " << kGoldenMinus << "\n\n";

  const SpectralReport rep = verify_lemma1(prob);
  for (const auto& v : rep.verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  measured " << v.measured << "\n";
  }
  return rep.pass() ? 0 : 1;
}
