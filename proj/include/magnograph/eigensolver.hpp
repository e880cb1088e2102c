#pragma once

#include <vector>

#include <Eigen/Core>

#include "magnograph/grid.hpp"
#include "magnograph/hermitian.hpp"

namespace magnograph {

struct EigenOptions {
  double tol = 1e-9;        // relative residual ||S phi - lambda M phi|| / ||S phi||
  int max_iter = 400;       // outer block iterations
  int dense_threshold = 400;
  int krylov_depth = 3;
  unsigned seed = 12345;
};

/// Smallest eigenpairs of S x = lambda M x, ascending, M-orthonormal.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd residuals;  // relative residual per pair
  std::vector<int> cluster;   // cluster id per eigenvalue
  Eigen::VectorXd mass_diagonal;

  int size() const { return static_cast<int>(values.size()); }
  int cluster_count() const { return cluster.empty() ? 0 : cluster.back() + 1; }
};

inline double cluster_tolerance(double lambda) { return 1e-7 * std::max(1.0, std::abs(lambda)); }

/// Throws ValidationError when k exceeds the dof count, ConvergenceError when
/// the iteration budget runs out.
Spectrum eigenpairs(const HermitianSystem& sys, int k, const EigenOptions& opt = {});

/// Groups consecutive eigenvalues closer than cluster_tolerance.
std::vector<int> clusters(const Eigen::VectorXd& values);

/// Number of clusters lying strictly below `bound`.
int clusters_below(const Spectrum& spec, double bound);

/// M-orthogonal projector onto the span of eigenvectors with lambda <= Lambda
/// (plus the cluster tolerance).
struct SpectralProjector {
  double threshold = 0.0;
  Eigen::MatrixXcd basis;
  Eigen::VectorXd mass_diagonal;
  double next_eigenvalue = 0.0;  // smallest computed eigenvalue above the threshold

  int rank() const { return static_cast<int>(basis.cols()); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd complement(const Eigen::VectorXcd& v) const { return v - apply(v); }
};

/// Throws ValidationError when Lambda is not below the largest computed eigenvalue.
SpectralProjector spectral_projector(const Spectrum& spec, double Lambda);

struct SupportCheck {
  double fraction = 0.0;
  bool supported = false;
};

/// Mass fraction of the ground state on the given edges (mask over grid.edges).
SupportCheck groundstate_support_check(const Spectrum& spec, const GraphGrid& grid,
                                       const std::vector<bool>& region, double support_tol = 1e-3);

}  // namespace magnograph
