#pragma once

#include <vector>

#include "magnograph/eigensolver.hpp"
#include "magnograph/gns.hpp"

namespace magnograph {

/// Mass thresholds built from the levels lambda_1 < lambda_2 < ... (distinct
/// eigenvalue clusters) and empirical GNS constants. All values inherit the
/// empirical-constant caveat of the constants.
struct Thresholds {
  double p = 0.0;
  double C_p = 0.0;
  double C_inf = 0.0;
  std::vector<double> levels;  // distinct eigenvalues, ascending
  double ess_surrogate = 0.0;  // +inf on compact graphs
  bool ess_caveat = false;

  std::vector<double> mu_tilde;          // per level; mu_tilde[0] = +inf
  std::vector<double> delta;             // per level; <= 0 when the level is not below the surrogate
  std::vector<double> mu_double_star;    // per level; NaN when delta <= 0
  // min(mu_{lambda_k/2,p}, mu_tilde_k), and also mu**_k on noncompact graphs
  std::vector<double> mu_star_level;
  double mu_0 = 0.0;       // mu_{lambda_1/2, p}
  double mu_star_0 = 0.0;  // mu_0, or min(mu_0, mu**_1) on noncompact graphs
  bool empirical_constants = true;

  double lambda_1() const { return levels.front(); }
  /// mu_{c,p}; throws DomainError for c <= 0.
  double mu_cp(double c) const;
  /// mu*_{lambda,p}; throws RegimeError unless lambda < 0 and 2 < p < 6.
  double mu_star(double lambda) const;
};

/// Closed forms used by Thresholds, exposed for tests.
double mu_cp_formula(double c, double p, double C_p, double lambda_1);
double mu_star_formula(double lambda, double p, double C_p);
double delta_formula(double ess, double lambda_k);
double mu_double_star_formula(double p, double C_inf, double lambda_k, double delta_k);
/// Largest mu keeping the strict level chain, by bisection to relative 1e-10.
double mu_tilde_bisect(const std::vector<double>& levels, std::size_t k, double p, double C_p);

/// Throws ValidationError when the spectrum holds fewer than k clusters.
Thresholds compute_thresholds(const Spectrum& spec, const GnsConstants& constants, double p, int k,
                              double ess_surrogate, bool ess_caveat);

/// Distinct cluster representatives (cluster means) of a spectrum.
std::vector<double> distinct_levels(const Spectrum& spec);

}  // namespace magnograph
