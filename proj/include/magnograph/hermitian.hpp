#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "magnograph/field.hpp"
#include "magnograph/grid.hpp"
#include "magnograph/potential.hpp"

namespace magnograph {

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

/// Discrete magnetic Schrödinger pencil (S, M):
///   u^H S u = sum_elements h |D_A u|^2 + sum_dofs w V |u|^2,   M = diag(w).
/// Kirchhoff vertex conditions are not imposed; they are the natural
/// conditions of the form. Pinned truncation nodes are eliminated.
struct HermitianSystem {
  SparseMatrixC S;
  Eigen::VectorXd mass_diagonal;
  int dof_count = 0;

  SparseMatrixC M() const;
  double quadratic(const Eigen::VectorXcd& u) const { return u.dot(S * u).real(); }
  double mass(const Eigen::VectorXcd& u) const { return mass_diagonal.dot(u.cwiseAbs2()); }
};

/// Assembles the pencil. Off-diagonal entries are generated once and mirrored
/// with complex conjugation, so S == S^H holds bit for bit.
HermitianSystem assemble(const GraphGrid& grid, const PotentialPair& pots);

/// max |S - S^H| over all entries.
double hermiticity_defect(const SparseMatrixC& S);

}  // namespace magnograph
