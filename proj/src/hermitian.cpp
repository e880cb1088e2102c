#include "magnograph/hermitian.hpp"

#include <cmath>
#include <vector>

#include "magnograph/error.hpp"

namespace magnograph {

using cd = std::complex<double>;

SparseMatrixC HermitianSystem::M() const {
  SparseMatrixC m(dof_count, dof_count);
  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(static_cast<std::size_t>(dof_count));
  for (int j = 0; j < dof_count; ++j) t.emplace_back(j, j, mass_diagonal[j]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

HermitianSystem assemble(const GraphGrid& grid, const PotentialPair& pots) {
  const int n = grid.dof_count;
  if (pots.V.size() != n) throw ValidationError("potentials do not match the grid");
  for (int j = 0; j < n; ++j) {
    if (!(pots.V[j] >= 1.0)) throw PotentialDomainError("V < 1 at dof " + std::to_string(j));
  }

  Eigen::VectorXd diag = grid.weights.cwiseProduct(pots.V);
  std::vector<Eigen::Triplet<cd>> upper;
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    for (int j = 0; j < e.elements(); ++j) {
      const int a = e.dof[static_cast<std::size_t>(j)];
      const int b = e.dof[static_cast<std::size_t>(j + 1)];
      const double theta = pots.edges[k].phase[j];
      // element form h|D|^2 with D = (e^{-i theta/2} u_b - e^{i theta/2} u_a)/(i h)
      const cd link = -cd(std::cos(theta), -std::sin(theta)) / e.h;  // S_ab
      if (a != kPinned) diag[a] += 1.0 / e.h;
      if (b != kPinned) diag[b] += 1.0 / e.h;
      if (a == kPinned || b == kPinned) continue;
      if (a == b) {
        diag[a] += 2.0 * link.real();
      } else if (a < b) {
        upper.emplace_back(a, b, link);
      } else {
        upper.emplace_back(b, a, std::conj(link));
      }
    }
  }

  SparseMatrixC U(n, n);
  U.setFromTriplets(upper.begin(), upper.end());
  SparseMatrixC D(n, n);
  std::vector<Eigen::Triplet<cd>> dt;
  for (int j = 0; j < n; ++j) dt.emplace_back(j, j, diag[j]);
  D.setFromTriplets(dt.begin(), dt.end());

  HermitianSystem sys;
  SparseMatrixC Uh = U.adjoint();
  sys.S = U + Uh + D;
  sys.S.makeCompressed();
  sys.mass_diagonal = grid.weights;
  sys.dof_count = n;
  return sys;
}

double hermiticity_defect(const SparseMatrixC& S) {
  SparseMatrixC Sh = S.adjoint();
  SparseMatrixC diff = S - Sh;
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

}  // namespace magnograph
