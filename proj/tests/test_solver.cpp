#include <gtest/gtest.h>

#include <cmath>

#include "magnograph/eigensolver.hpp"
#include "magnograph/error.hpp"
#include "magnograph/gns.hpp"
#include "magnograph/penalty.hpp"
#include "magnograph/solver.hpp"
#include "support.hpp"

using namespace magnograph;
using namespace testing_support;

namespace {

Problem problem(const Workspace& ws, double p, double mu) {
  return make_problem(ws.graph, ws.grid, ws.pots, ws.sys, p, mu);
}

Eigen::VectorXcd scaled(Eigen::VectorXcd u, const HermitianSystem& sys, double mass) {
  return u * std::sqrt(mass / sys.mass(u));
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.r_schedule = {2, 2};
  EXPECT_THROW(c.validate(), ValidationError);
  c.r_schedule = {1, 2};
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(OrbitDistance, IgnoresGlobalPhase) {
  auto ws = workspace(kTadpole, "0", "1", 5e-2);
  const auto u = random_complex(ws->sys.dof_count, 1);
  EXPECT_LT(orbit_distance(u, std::polar(1.0, 2.1) * u, ws->sys.mass_diagonal), 1e-12 * std::sqrt(ws->sys.mass(u)));
  const auto w = random_complex(ws->sys.dof_count, 2);
  EXPECT_GT(orbit_distance(u, w, ws->sys.mass_diagonal), 0.1);
}

TEST(ProjectedGradient, SmallMassConstantFamily) {
  const double ell = 1.0, mu = 1e-3;
  auto ws = workspace(interval(ell), "0", "1", 1e-2);
  const Eigen::VectorXcd start =
      Eigen::VectorXcd::Ones(ws->sys.dof_count) + 0.05 * random_complex(ws->sys.dof_count, 3);
  const CriticalPoint cp = projected_gradient(scaled(start, ws->sys, mu), problem(*ws, 4.0, mu));
  EXPECT_NEAR(cp.mass, mu, 1e-12);
  EXPECT_NEAR(cp.lambda, 1.0 - mu / ell, 1e-8);
  EXPECT_LE(cp.weak_residual, 1e-8);
  const Eigen::VectorXd mod = cp.u.cwiseAbs();
  EXPECT_LT(mod.maxCoeff() - mod.minCoeff(), 1e-6 * mod.maxCoeff());
}

TEST(ProjectedGradient, ModerateMassStaysBelowGroundLevel) {
  auto ws = workspace(interval(1.0), "0", "1", 1e-2);
  const CriticalPoint cp = projected_gradient(scaled(Eigen::VectorXcd::Ones(ws->sys.dof_count), ws->sys, 0.5),
                                              problem(*ws, 4.0, 0.5));
  EXPECT_LE(cp.lambda, 1.0 + 1e-8);
  EXPECT_NEAR(cp.lambda, 0.5, 1e-8);  // the constant branch c^2 = 0.5
  EXPECT_LE(cp.energy, 0.5 / 2 + 1e-10);
}

TEST(ProjectedGradient, SupercriticalDiverges) {
  auto ws = workspace(interval(1.0), "0", "1", 1e-2);
  ProbeGenerator gen(ws->graph, ws->grid, 4);
  EXPECT_THROW(projected_gradient(scaled(gen.bump(), ws->sys, 5.0), problem(*ws, 8.0, 5.0)), DivergenceError);
}

TEST(Penalized, ZeroSeedFails) {
  auto ws = workspace(interval(1.0), "0", "1", 5e-2);
  EXPECT_THROW(penalized_critical_point(Eigen::VectorXcd::Zero(ws->sys.dof_count), problem(*ws, 4.0, 0.5), {}, 8.0),
               ConvergenceError);
}

TEST(Penalized, MultiplierFormulasAgree) {
  auto ws = workspace(kInterval, "0", "1", 1e-2);
  const double mu = 0.5, p = 4.0;
  const Spectrum s = eigenpairs(ws->sys, 1);
  const Problem prob = problem(*ws, p, mu);
  const CriticalPoint cp =
      penalized_critical_point(scaled(s.vectors.col(0), ws->sys, 0.9 * mu), prob, SolverConfig{}, 8.0);
  EXPECT_LT(cp.mass, mu);
  const double penalty_form = 2.0 / mu * f_r_prime(cp.mass / mu, 8.0);
  const Eigen::VectorXcd Su = ws->sys.S * cp.u;
  const Eigen::VectorXcd N = nonlinear_load(cp.u, p, prob.params.psi_weights);
  const double rayleigh_form = cp.u.dot(Su - N).real() / cp.mass;
  EXPECT_NEAR(penalty_form, rayleigh_form, 1e-6);
  EXPECT_NEAR(cp.lambda, penalty_form, 1e-12);

  // Bounded (PS) diagnostic: (p-2)/2 ||u||^2 <= p E_{r,mu}(u) near convergence.
  const EnergyReport rep = energy(ws->sys, cp.u, make_energy_params(ws->graph, ws->grid, p, mu, 8.0));
  EXPECT_LE((p - 2) / 2 * ws->sys.quadratic(cp.u), p * rep.total + 1e-8);
}

TEST(Continuation, MassIncreasesAlongSchedule) {
  auto ws = workspace(kInterval, "0", "1", 1e-2);
  const double mu = 0.5;
  const Spectrum s = eigenpairs(ws->sys, 1);
  const CriticalPoint cp = r_continuation(scaled(s.vectors.col(0), ws->sys, 0.9 * mu), problem(*ws, 4.0, mu), {});
  ASSERT_GE(cp.trace.size(), 2u);
  double peak = 0.0;
  for (std::size_t i = 1; i < cp.trace.size(); ++i) EXPECT_GE(cp.trace[i].mass, cp.trace[i - 1].mass);
  for (const auto& st : cp.trace) peak = std::max(peak, st.penalty);
  // f_r(mass/mu) rises over the first stages, then decays towards zero.
  EXPECT_LT(cp.trace.back().penalty, 0.02 * peak);
  EXPECT_EQ(cp.dichotomy, Dichotomy::MassReached);
  EXPECT_NEAR(cp.mass, mu, 1e-6 * mu);
  EXPECT_GE(cp.lambda, 0.0);
  EXPECT_LE(cp.lambda, s.values[0] + 1e-6);
  EXPECT_LE(cp.energy, mu * s.values[0] / 2 + 1e-8);
  EXPECT_NEAR(cp.lambda, 1.0 - mu / kPi, 1e-4);
}

TEST(Continuation, PhaseAnchorOnlyPicksTheRepresentative) {
  auto ws = workspace(kTadpole, "0.4", "1+x", 2e-2);
  const double mu = 0.3;
  const Spectrum s = eigenpairs(ws->sys, 1);
  const Eigen::VectorXcd seed = scaled(s.vectors.col(0), ws->sys, 0.9 * mu);
  SolverConfig a, b;
  a.phase_anchor = 0;
  b.phase_anchor = ws->sys.dof_count / 2;
  const Problem prob = problem(*ws, 4.0, mu);
  const CriticalPoint ca = r_continuation(seed, prob, a), cb = r_continuation(seed, prob, b);
  EXPECT_LT(orbit_distance(ca.u, cb.u, ws->sys.mass_diagonal), 1e-8 * std::sqrt(mu));
  for (const auto& [cp, cfg] : {std::pair{&ca, &a}, std::pair{&cb, &b}}) {
    EXPECT_EQ(cp->u[cfg->phase_anchor].imag(), 0.0);
    EXPECT_GT(cp->u[cfg->phase_anchor].real(), 0.0);
  }
}

TEST(Continuation, ResidualsOnTadpoleWithField) {
  const double h = 1e-2;
  auto ws = workspace(kTadpole, "0.3+0.2*sin(x)", "1+x/4", h);
  const double mu = 0.2;
  const Spectrum s = eigenpairs(ws->sys, 1);
  const CriticalPoint cp = r_continuation(scaled(s.vectors.col(0), ws->sys, 0.9 * mu), problem(*ws, 4.0, mu), {});
  EXPECT_LE(cp.weak_residual, 1e-8);
  EXPECT_LE(cp.strong_residual, 10 * h);
  EXPECT_LE(cp.vertex_residual, 10 * h);
  EXPECT_LE(cp.lambda, s.values[0] + 1e-6);
}

TEST(MultiBranch, InterlacingOnInterval) {
  auto ws = workspace(kInterval, "0", "1", 1e-2);
  const double mu = 1e-2;
  const Spectrum s = eigenpairs(ws->sys, 3);
  const BranchResult res = multi_branch(problem(*ws, 4.0, mu), s, SolverConfig{}, 3);
  ASSERT_EQ(res.points.size(), 3u);
  EXPECT_FALSE(res.collapse);
  for (std::size_t j = 0; j < 3; ++j) {
    const CriticalPoint& cp = res.points[j];
    EXPECT_EQ(cp.dichotomy, Dichotomy::MassReached);
    EXPECT_LE(cp.energy, mu * s.values[j] / 2 + 1e-6);
    if (j) EXPECT_GT(cp.energy, mu * s.values[j - 1] / 2);
    EXPECT_LE(cp.lambda, s.values[j] + 1e-6);
    EXPECT_GE(cp.lambda, -1e-6);
    for (std::size_t i = 0; i < j; ++i)
      EXPECT_GT(orbit_distance(cp.u, res.points[i].u, ws->sys.mass_diagonal), 1e-3 * std::sqrt(mu));
  }
}

TEST(MultiBranch, SingleBranchIsContinuationFromGroundState) {
  auto ws = workspace(interval(2.0), "0", "1", 2e-2);
  const double mu = 0.1;
  const Spectrum s = eigenpairs(ws->sys, 1);
  const Problem prob = problem(*ws, 4.0, mu);
  const BranchResult res = multi_branch(prob, s, SolverConfig{}, 1);
  ASSERT_EQ(res.points.size(), 1u);
  const CriticalPoint direct = r_continuation(scaled(s.vectors.col(0), ws->sys, 0.9 * mu), prob, {});
  EXPECT_NEAR(res.points[0].lambda, direct.lambda, 1e-9);
  EXPECT_EQ(res.points[0].seed_index, 1);
}
