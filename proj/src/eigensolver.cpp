#include "magnograph/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "magnograph/error.hpp"

namespace magnograph {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

double relative_residual(const HermitianSystem& sys, const VectorXcd& x, double lambda) {
  VectorXcd Sx = sys.S * x;
  VectorXcd r = Sx - lambda * sys.mass_diagonal.cwiseProduct(x);
  double den = Sx.norm();
  return den > 0 ? r.norm() / den : r.norm();
}

void finish(Spectrum& spec, const HermitianSystem& sys) {
  spec.residuals.resize(spec.values.size());
  for (int j = 0; j < spec.values.size(); ++j)
    spec.residuals[j] = relative_residual(sys, spec.vectors.col(j), spec.values[j]);
  spec.cluster = clusters(spec.values);
  spec.mass_diagonal = sys.mass_diagonal;
}

// Normalizes a global phase so results are reproducible: the largest entry is real positive.
void fix_phase(MatrixXcd& X) {
  for (int j = 0; j < X.cols(); ++j) {
    Eigen::Index i;
    X.col(j).cwiseAbs().maxCoeff(&i);
    cd z = X(i, j);
    if (std::abs(z) > 0) X.col(j) *= std::conj(z) / std::abs(z);
  }
}

Spectrum dense_eigenpairs(const HermitianSystem& sys, int k) {
  VectorXd isq = sys.mass_diagonal.cwiseSqrt().cwiseInverse();
  MatrixXcd A = MatrixXcd(sys.S);
  A = isq.asDiagonal() * A * isq.asDiagonal();
  A = (0.5 * (A + A.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(A);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  Spectrum spec;
  spec.values = es.eigenvalues().head(k);
  spec.vectors = isq.asDiagonal() * es.eigenvectors().leftCols(k);
  fix_phase(spec.vectors);
  finish(spec, sys);
  return spec;
}

// Modified Gram-Schmidt in the M inner product, two passes; drops columns that
// collapse below `drop` of their incoming norm.
MatrixXcd m_orthonormalize(const MatrixXcd& X, const VectorXd& m, int keep_first = 0) {
  MatrixXcd Q(X.rows(), X.cols());
  int q = 0;
  auto mdot = [&](const VectorXcd& a, const VectorXcd& b) { return a.dot(m.cwiseProduct(b)); };
  for (int j = 0; j < X.cols(); ++j) {
    VectorXcd v = X.col(j);
    double n0 = std::sqrt(std::max(0.0, mdot(v, v).real()));
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < q; ++i) v -= Q.col(i) * mdot(Q.col(i), v);
    }
    double n1 = std::sqrt(std::max(0.0, mdot(v, v).real()));
    if (n1 <= 1e-10 * n0 && j >= keep_first) continue;
    Q.col(q++) = v / n1;
  }
  return Q.leftCols(q);
}

}  // namespace

std::vector<int> clusters(const VectorXd& values) {
  std::vector<int> id(static_cast<std::size_t>(values.size()));
  int c = -1;
  for (int j = 0; j < values.size(); ++j) {
    if (j == 0 || values[j] - values[j - 1] > cluster_tolerance(values[j])) ++c;
    id[static_cast<std::size_t>(j)] = c;
  }
  return id;
}

int clusters_below(const Spectrum& spec, double bound) {
  int count = 0;
  for (int j = 0; j < spec.size(); ++j) {
    if (spec.values[j] >= bound) break;
    count = spec.cluster[static_cast<std::size_t>(j)] + 1;
  }
  return count;
}

Spectrum eigenpairs(const HermitianSystem& sys, int k, const EigenOptions& opt) {
  const int n = sys.dof_count;
  if (k < 1 || k > n) throw ValidationError("requested " + std::to_string(k) + " eigenpairs but the grid has " +
                                            std::to_string(n) + " dofs");
  if (n <= opt.dense_threshold) return dense_eigenpairs(sys, k);

  // V >= 1 gives S >= M, so this shift keeps S - sigma M definite.
  const double sigma = 0.9;
  SparseMatrixC shifted = sys.S - sigma * sys.M();
  Eigen::SimplicialLDLT<SparseMatrixC> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("factorization of the shifted pencil failed");

  const VectorXd& m = sys.mass_diagonal;
  double kappa = 0.0;
  for (int j = 0; j < n; ++j) kappa = std::max(kappa, std::real(sys.S.coeff(j, j)) / m[j]);
  const int block = std::min(n, k + std::max(k, 8));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  MatrixXcd X(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = cd(gauss(rng), gauss(rng));
  X = m_orthonormalize(X, m);

  VectorXd theta_prev = VectorXd::Constant(k, 0.0);
  int stagnant = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    // Krylov block [X, Op X, Op^2 X, ...] with Op = (S - sigma M)^{-1} M.
    std::vector<MatrixXcd> blocks{X};
    for (int d = 1; d < opt.krylov_depth; ++d) {
      MatrixXcd Y = ldlt.solve(m.asDiagonal() * blocks.back());
      blocks.push_back(Y);
    }
    MatrixXcd K(n, X.cols() * static_cast<int>(blocks.size()));
    for (std::size_t b = 0; b < blocks.size(); ++b) K.middleCols(static_cast<int>(b) * X.cols(), X.cols()) = blocks[b];
    MatrixXcd Q = m_orthonormalize(K, m);
    if (Q.cols() < k) throw ConvergenceError("Krylov basis collapsed");

    MatrixXcd H = Q.adjoint() * (sys.S * Q);
    H = (0.5 * (H + H.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    const int take = std::min<int>(block, static_cast<int>(Q.cols()));
    X = Q * es.eigenvectors().leftCols(take);
    VectorXd theta = es.eigenvalues().head(k);

    // Relative residuals cannot go below roughly eps * cond(S, M) ~ eps * 4/h^2,
    // so each pair is judged against max(tol, rounding floor).
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      const double floor = 100.0 * std::numeric_limits<double>::epsilon() * kappa / std::max(theta[j], 1.0);
      worst = std::max(worst, relative_residual(sys, X.col(j), theta[j]) / std::max(opt.tol, floor));
    }
    double change = ((theta - theta_prev).cwiseAbs().array() / theta.cwiseAbs().array().max(1.0)).maxCoeff();
    theta_prev = theta;
    stagnant = change < 1e-10 ? stagnant + 1 : 0;
    if (worst <= 1.0 || (stagnant >= 5 && worst <= 1e3)) {
      Spectrum spec;
      spec.values = theta;
      spec.vectors = X.leftCols(k);
      fix_phase(spec.vectors);
      finish(spec, sys);
      return spec;
    }
  }
  throw ConvergenceError("eigensolver did not converge within " + std::to_string(opt.max_iter) + " iterations");
}

VectorXcd SpectralProjector::apply(const VectorXcd& v) const {
  if (basis.cols() == 0) return VectorXcd::Zero(v.size());
  VectorXcd c = basis.adjoint() * mass_diagonal.cwiseProduct(v);
  return basis * c;
}

SpectralProjector spectral_projector(const Spectrum& spec, double Lambda) {
  if (spec.size() == 0 || !(Lambda < spec.values[spec.size() - 1]))
    throw ValidationError("projector threshold must lie below the largest computed eigenvalue");
  SpectralProjector P;
  P.threshold = Lambda;
  P.mass_diagonal = spec.mass_diagonal;
  int r = 0;
  while (r < spec.size() && spec.values[r] <= Lambda + cluster_tolerance(Lambda)) ++r;
  P.basis = spec.vectors.leftCols(r);
  P.next_eigenvalue = spec.values[r];
  return P;
}

SupportCheck groundstate_support_check(const Spectrum& spec, const GraphGrid& grid, const std::vector<bool>& region,
                                       double support_tol) {
  SupportCheck out;
  if (spec.size() == 0) return out;
  VectorXd w = region_weights(grid, region);
  VectorXd a2 = spec.vectors.col(0).cwiseAbs2();
  double total = grid.weights.dot(a2);
  out.fraction = total > 0 ? w.dot(a2) / total : 0.0;
  out.supported = out.fraction > support_tol;
  return out;
}

}  // namespace magnograph
