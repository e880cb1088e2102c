#pragma once

#include <optional>

#include <Eigen/Core>

#include "magnograph/field.hpp"
#include "magnograph/hermitian.hpp"
#include "magnograph/penalty.hpp"

namespace magnograph {

/// Nonlinearity power p > 2, target mass mu > 0, optional penalty exponent
/// r > 1, and the quadrature weights of the nonlinearity region.
struct EnergyParams {
  double p = 4.0;
  double mu = 1.0;
  std::optional<double> r;
  Eigen::VectorXd psi_weights;

  /// Throws ValidationError on p <= 2, mu <= 0 or r <= 1.
  void validate() const;
};

EnergyParams make_energy_params(const MetricGraph& g, const GraphGrid& grid, double p, double mu,
                                std::optional<double> r = std::nullopt);

struct EnergyReport {
  double quadratic = 0.0;  // ||u||^2 / 2
  double psi = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  double mass = 0.0;
  double grad_norm = 0.0;  // ||Su - N(u) - lambda M u||_{M^-1} / ||u||_M
  double multiplier = 0.0;
};

/// Nodal nonlinear load N_j = w_j |u_j|^{p-2} u_j over the region weights.
Eigen::VectorXcd nonlinear_load(const Eigen::VectorXcd& u, double p, const Eigen::VectorXd& psi_weights);

double psi(const Eigen::VectorXcd& u, double p, const Eigen::VectorXd& psi_weights);

/// Throws OutsideUMu when a penalty is requested and mass >= mu.
EnergyReport energy(const HermitianSystem& sys, const Eigen::VectorXcd& u, const EnergyParams& params);

/// Dual residual g with d/dt E(u + t v) = Re(v^H g). With a penalty this is
/// the exact gradient of E_{r,mu}, multiplier (2/mu) f_r'(mass/mu). Without
/// one the multiplier is the Rayleigh-type estimate Re u^H(Su - N) / mass.
struct Gradient {
  Eigen::VectorXcd g;
  double multiplier = 0.0;
};
Gradient gradient(const HermitianSystem& sys, const Eigen::VectorXcd& u, const EnergyParams& params);

/// ||g||_{M^-1}.
double dual_norm(const Eigen::VectorXcd& g, const Eigen::VectorXd& mass_diagonal);

/// Relative weak residual ||Su - N(u) - lambda M u||_{M^-1} / ||u||_M.
double weak_residual(const HermitianSystem& sys, const Eigen::VectorXcd& u, double lambda, double p,
                     const Eigen::VectorXd& psi_weights);

}  // namespace magnograph
