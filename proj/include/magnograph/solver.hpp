#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "magnograph/eigensolver.hpp"
#include "magnograph/energy.hpp"
#include "magnograph/field.hpp"
#include "magnograph/hermitian.hpp"

namespace magnograph {

struct SolverConfig {
  double grad_tol = 1e-8;          // relative weak residual
  double mass_tol = 1e-6;          // relative mass gap accepted as "reached"
  int max_iter = 200;              // Newton iterations per stage
  int pg_max_iter = 20000;         // projected-gradient iterations
  std::vector<double> r_schedule{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  double armijo = 1e-4;
  int max_backtracks = 40;
  double deflation_shift = 1.0;
  double distinct_tol = 1e-3;      // orbit distance threshold, relative to sqrt(mu)
  int phase_anchor = -1;           // dof index; -1 picks the largest entry of the seed
  std::uint64_t seed = 1;
  bool polish = true;              // constrained Newton after the schedule

  /// Throws ValidationError on a non-increasing schedule or r <= 1.
  void validate() const;
};

enum class Dichotomy { MassReached, MassStagnated, Unconstrained };
std::string to_string(Dichotomy d);

struct StageRecord {
  double r = 0.0;
  double mass = 0.0;
  double lambda = 0.0;
  double penalized_energy = 0.0;
  double penalty = 0.0;
  int iterations = 0;
};

struct CriticalPoint {
  Eigen::VectorXcd u;
  double lambda = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  double weak_residual = 0.0;
  double strong_residual = 0.0;
  std::vector<double> vertex_residuals;
  double vertex_residual = 0.0;
  std::string branch;
  double r_final = 0.0;
  Dichotomy dichotomy = Dichotomy::Unconstrained;
  int seed_index = 0;  // eigenfunction index used as seed, 1-based; 0 if none
  std::vector<StageRecord> trace;
};

/// Everything the solvers share for one (graph, potentials, p, mu) instance.
struct Problem {
  const MetricGraph* graph = nullptr;
  const GraphGrid* grid = nullptr;
  const PotentialPair* pots = nullptr;
  const HermitianSystem* sys = nullptr;
  EnergyParams params;  // r unset; stages set it
  std::vector<bool> region_mask;
};

Problem make_problem(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                     const HermitianSystem& sys, double p, double mu);

/// Fills energy, mass, residual diagnostics of a point from (u, lambda).
void finalize(const Problem& prob, CriticalPoint& cp);

/// Linear ground state by preconditioned block minimization of the Rayleigh
/// quotient (an algorithm independent of `eigenpairs`), scaled to mass mu.
CriticalPoint minimize_rayleigh(const HermitianSystem& sys, double mu, const SolverConfig& cfg = {});

/// Descent on E over the mass sphere with Sobolev-preconditioned steps and
/// mass rescaling. Throws DivergenceError when E drops below -1e6,
/// ConvergenceError when the budget runs out.
CriticalPoint projected_gradient(const Eigen::VectorXcd& u0, const Problem& prob, const SolverConfig& cfg = {});

/// Orbit distance min_theta ||u - e^{i theta} w||_M.
double orbit_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& w, const Eigen::VectorXd& mass_diagonal);

/// Critical point of E_{r,mu} by damped Newton inside U_mu, optionally
/// deflated against `known`. Throws ConvergenceError (including for a zero
/// seed) or LeftUMu.
CriticalPoint penalized_critical_point(const Eigen::VectorXcd& seed, const Problem& prob, const SolverConfig& cfg,
                                       double r, const std::vector<Eigen::VectorXcd>& known = {});

/// Constrained critical point at mass exactly mu by bordered Newton.
CriticalPoint constrained_newton(const Eigen::VectorXcd& seed, double lambda0, const Problem& prob,
                                 const SolverConfig& cfg, const std::vector<Eigen::VectorXcd>& known = {});

/// Penalized stages along cfg.r_schedule, then a constrained polish. The
/// result carries MassReached or MassStagnated (free critical point at mass
/// below mu with multiplier ~ 0).
CriticalPoint r_continuation(const Eigen::VectorXcd& seed, const Problem& prob, const SolverConfig& cfg,
                             const std::vector<Eigen::VectorXcd>& known = {});

struct BranchResult {
  std::vector<CriticalPoint> points;  // sorted by energy
  bool collapse = false;              // fewer than k distinct orbits found
  std::vector<std::string> notes;
};

/// Seeds from the first k eigenfunctions, continuation with deflation against
/// earlier branches, distinctness by orbit distance.
BranchResult multi_branch(const Problem& prob, const Spectrum& spec, const SolverConfig& cfg, int k);

}  // namespace magnograph
