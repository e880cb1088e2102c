#include "magnograph/energy.hpp"

#include <cmath>

#include "magnograph/error.hpp"

namespace magnograph {

using Eigen::VectorXcd;
using Eigen::VectorXd;

void EnergyParams::validate() const {
  if (!(p > 2.0)) throw ValidationError("p must exceed 2");
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (r && !(*r > 1.0)) throw ValidationError("r must exceed 1");
}

EnergyParams make_energy_params(const MetricGraph& g, const GraphGrid& grid, double p, double mu,
                                std::optional<double> r) {
  EnergyParams params;
  params.p = p;
  params.mu = mu;
  params.r = r;
  params.psi_weights = region_weights(grid, nonlinearity_mask(g, grid));
  params.validate();
  return params;
}

VectorXcd nonlinear_load(const VectorXcd& u, double p, const VectorXd& psi_weights) {
  VectorXcd N(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double a = std::abs(u[j]);
    N[j] = a == 0.0 ? 0.0 : psi_weights[j] * std::pow(a, p - 2.0) * u[j];
  }
  return N;
}

double psi(const VectorXcd& u, double p, const VectorXd& psi_weights) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) s += psi_weights[j] * std::pow(std::abs(u[j]), p);
  return s / p;
}

double dual_norm(const VectorXcd& g, const VectorXd& m) {
  return std::sqrt(g.cwiseAbs2().cwiseQuotient(m).sum());
}

double weak_residual(const HermitianSystem& sys, const VectorXcd& u, double lambda, double p,
                     const VectorXd& psi_weights) {
  const double norm_u = std::sqrt(sys.mass(u));
  if (norm_u == 0.0) return 0.0;
  VectorXcd r = sys.S * u - nonlinear_load(u, p, psi_weights) - lambda * sys.mass_diagonal.cwiseProduct(u);
  return dual_norm(r, sys.mass_diagonal) / norm_u;
}

Gradient gradient(const HermitianSystem& sys, const VectorXcd& u, const EnergyParams& params) {
  params.validate();
  const double m = sys.mass(u);
  VectorXcd free = sys.S * u - nonlinear_load(u, params.p, params.psi_weights);
  Gradient out;
  if (params.r) {
    const double s = m / params.mu;
    if (s >= 1.0) throw OutsideUMu("mass " + std::to_string(m) + " is not below mu = " + std::to_string(params.mu));
    out.multiplier = 2.0 / params.mu * f_r_prime(s, *params.r);
  } else {
    out.multiplier = m > 0.0 ? u.dot(free).real() / m : 0.0;
  }
  out.g = free - out.multiplier * sys.mass_diagonal.cwiseProduct(u);
  return out;
}

EnergyReport energy(const HermitianSystem& sys, const VectorXcd& u, const EnergyParams& params) {
  params.validate();
  EnergyReport rep;
  rep.mass = sys.mass(u);
  rep.quadratic = 0.5 * sys.quadratic(u);
  rep.psi = psi(u, params.p, params.psi_weights);
  if (params.r) {
    const double s = rep.mass / params.mu;
    if (s >= 1.0)
      throw OutsideUMu("mass " + std::to_string(rep.mass) + " is not below mu = " + std::to_string(params.mu));
    rep.penalty = f_r(s, *params.r);
  }
  rep.total = rep.quadratic - rep.psi - rep.penalty;
  Gradient gr = gradient(sys, u, params);
  rep.multiplier = gr.multiplier;
  rep.grad_norm = rep.mass > 0.0 ? dual_norm(gr.g, sys.mass_diagonal) / std::sqrt(rep.mass) : 0.0;
  return rep;
}

}  // namespace magnograph
