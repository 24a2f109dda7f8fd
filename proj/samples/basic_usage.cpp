// Superenergy of a Maxwell field and a few checks on it.

#include <iostream>

#include "sek/causal_cones.hpp"
#include "sek/folded_forms.hpp"
#include "sek/rainich.hpp"

int main() {
  using namespace sek;
  const FrameRef f = minkowski(4);
  const Tensor e = wedge(basis_covector(f, 0), basis_covector(f, 1));
  const Tensor t = superenergy(e).tensor;

  std::cout << "T{F}_00 = " << t(0, 0) << ", trace = " << trace(t) << "\n";
  const DPVerdict dp = check_dp2_exact(t, DPSign::plus);
  std::cout << "dominant: " << std::boolalpha << dp.member << " (margin " << dp.margin << ")\n";
  const EMClassification c = classify_em(t);
  std::cout << "classified as " << to_string(c.kind) << "\n";

  const auto d = decompose_dp2(t);
  std::cout << d.terms.size() << " simple terms, reassembly residual " << d.residual << "\n";
}
