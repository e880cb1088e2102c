#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "magnograph/field.hpp"
#include "magnograph/graph.hpp"
#include "magnograph/grid.hpp"
#include "magnograph/potential.hpp"
#include "magnograph/solver.hpp"
#include "magnograph/thresholds.hpp"

namespace magnograph {

/// Outcome of one check. `measured` is the worst signed violation found
/// (positive means the inequality is broken) unless the check says otherwise;
/// `bound` is what it is compared against and `tol` the slack granted.
/// Audits only read their inputs, so equal inputs give equal reports.
struct AuditReport {
  std::string check;
  std::string target_hash;
  bool pass = true;
  double measured = 0.0;
  double bound = 0.0;
  double tol = 0.0;
  std::string notes;
};

/// Banner prepended to audit CSVs. The nonexistence audit can only look for
/// counterexamples among the points it is handed.
extern const char* const kAuditScope;

/// `check,target_hash,pass,measured,bound,tol`, one row per report, numbers
/// with 17 significant digits. `comments` become leading `# ` lines.
std::string audit_csv(const std::vector<AuditReport>& reports, const std::vector<std::string>& comments = {});

// Diamagnetic inequality ------------------------------------------------------

/// One element: |(|u_{j+1}| - |u_j|)/h| against |D_A u| on that element.
struct DiamagneticSample {
  double modulus_slope = 0.0;
  double covariant = 0.0;
  double h = 0.0;
  bool exempt = false;  // next to a zero of u
};

/// Per-element samples; elements touching |u| < 1e-8 sup|u| are exempt.
std::vector<DiamagneticSample> diamagnetic_samples(const GraphFunction& u, const PotentialPair& pots,
                                                   const GraphGrid& grid);

/// Core comparison: passes iff modulus_slope <= covariant + C h sup|u| on every
/// non-exempt element. Exposed so tests can feed corrupted arrays.
AuditReport diamagnetic_check(const std::vector<DiamagneticSample>& samples, double u_sup, double C = 1.0);

/// Throws ValidationError for u == 0.
AuditReport audit_diamagnetic(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid,
                              double C = 1.0);

// Nonexistence below mu_{c,p} ------------------------------------------------

/// Counts points that sit inside the excluded region: mass < mu_{c,p}, free
/// residual possibly <= grad_tol and E <= c mu_{c,p}; for 2 < p < 6 also
/// points with lambda < 0 and mass < mu*_{lambda,p}. `measured` is the count.
AuditReport audit_nonexistence(const std::vector<CriticalPoint>& points, const Thresholds& th, double c,
                               double grad_tol);

// Multiplier range ------------------------------------------------------------

/// MassReached points seeded from the ground state (seed index 0 or 1) must
/// satisfy lambda - shift <= lambda_1 + tol and, when `small_mu`,
/// lambda - shift >= -tol. A problem solved with V + shift passes `shift` so
/// its multipliers are mapped back.
AuditReport audit_multiplier_ranges(const std::vector<CriticalPoint>& points, double lambda_1, double tol,
                                    bool small_mu, double shift = 0.0);

// Gauge and flux --------------------------------------------------------------

using SpectrumFn = std::function<Eigen::VectorXd(const PotentialPair&)>;

/// Compares the spectra of two potential sets. With `expect_equal` the check
/// passes when the largest relative eigenvalue difference is <= tol (same flux,
/// or a tree against A = 0); otherwise it passes when it exceeds tol.
AuditReport audit_gauge_flux(const MetricGraph& g, const PotentialPair& pots, const PotentialPair& reference,
                             const SpectrumFn& spectrum, double tol, bool expect_equal = true);

/// Integral of A over a bounded edge, in the edge's own orientation.
double edge_flux(const PotentialPair& pots, std::size_t edge_index);

// Energy levels ---------------------------------------------------------------

/// For each point with seed index j >= 1: E <= mu lambda_j / 2 + tol, and for
/// j >= 2 also E > mu lambda_{j-1} / 2. `lambdas` are eigenvalues with
/// multiplicity, lambdas[0] = lambda_1. `measured` folds tol in, so it is the
/// worst of E - mu lambda_j/2 - tol and mu lambda_{j-1}/2 - E; notes carry the
/// smallest slack.
AuditReport audit_energy_levels(const std::vector<CriticalPoint>& points, const std::vector<double>& lambdas,
                                double mu, double tol);

/// Hash of the fields the audits read from a set of points.
std::string points_hash(const std::vector<CriticalPoint>& points);

}  // namespace magnograph
