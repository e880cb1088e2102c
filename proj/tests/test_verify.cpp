#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "magnograph/audit.hpp"
#include "magnograph/eigensolver.hpp"
#include "magnograph/error.hpp"
#include "magnograph/gns.hpp"
#include "magnograph/hermitian.hpp"
#include "magnograph/solver.hpp"
#include "magnograph/thresholds.hpp"
#include "support.hpp"

using namespace magnograph;
using namespace testing_support;

namespace {

SpectrumFn spectrum_on(const GraphGrid& grid, int k) {
  return [&grid, k](const PotentialPair& pots) { return eigenpairs(assemble(grid, pots), k).values; };
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Ground branches on the pi-interval at small mass, shared by several tests.
struct IntervalRun {
  std::unique_ptr<Workspace> ws = workspace(kInterval, "0", "1", 1e-2);
  double mu = 1e-2;
  Spectrum spec = eigenpairs(ws->sys, 3);
  BranchResult res =
      multi_branch(make_problem(ws->graph, ws->grid, ws->pots, ws->sys, 4.0, mu), spec, SolverConfig{}, 3);
};

const IntervalRun& interval_run() {
  static const IntervalRun run;
  return run;
}

// Constant solutions c on [0, 1] with p = 4: lambda = 1 - c^2, mass c^2.
CriticalPoint constant_point(const Workspace& ws, double c) {
  CriticalPoint cp;
  cp.u = Eigen::VectorXcd::Constant(ws.sys.dof_count, cd(c, 0.0));
  cp.lambda = 1.0 - c * c;
  cp.mass = c * c;
  cp.energy = c * c / 2 - std::pow(c, 4) / 4;
  cp.weak_residual = 0.0;
  cp.dichotomy = Dichotomy::MassReached;
  return cp;
}

}  // namespace

TEST(Diamagnetic, RealPositiveFieldIsEquality) {
  auto ws = workspace(kTadpole, "0", "1", 1e-2);
  const auto u = sample_function(ws->grid, [](std::size_t, double x) { return cd(2.0 + std::sin(3 * x), 0.0); });
  for (const auto& s : diamagnetic_samples(u, ws->pots, ws->grid)) EXPECT_NEAR(s.modulus_slope, s.covariant, 1e-12);
  EXPECT_TRUE(audit_diamagnetic(u, ws->pots, ws->grid).pass);
}

TEST(Diamagnetic, PlaneWaveBothSidesVanish) {
  auto ws = workspace(interval(10.0), "0.7", "1", 1e-2);
  const auto u = sample_function(ws->grid, [](std::size_t, double x) { return std::polar(1.0, 0.7 * x); });
  for (const auto& s : diamagnetic_samples(u, ws->pots, ws->grid)) {
    EXPECT_LT(s.modulus_slope, 1e-12);
    EXPECT_LT(s.covariant, 1e-12);
  }
}

TEST(Diamagnetic, RandomFieldsPassAndHalvedCovariantFails) {
  auto ws = workspace(kTadpole, "e0=1.3*sin(x);e1=-2+x", "1", 2e-2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto u = random_complex(ws->sys.dof_count, seed);
    const AuditReport r = audit_diamagnetic(u, ws->pots, ws->grid);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.measured, 0.0);
  }
  const auto u = sample_function(ws->grid, [](std::size_t, double x) { return cd(2.0 + std::cos(x), 0.0); });
  auto samples = diamagnetic_samples(u, without_magnetic(ws->pots), ws->grid);
  for (auto& s : samples) s.covariant *= 0.5;
  EXPECT_FALSE(diamagnetic_check(samples, 3.0).pass);
  EXPECT_THROW(audit_diamagnetic(Eigen::VectorXcd::Zero(ws->sys.dof_count), ws->pots, ws->grid), ValidationError);
}

TEST(Diamagnetic, ZerosAreExempt) {
  auto ws = workspace(kInterval, "0", "1", 1e-2);
  const auto u = sample_function(ws->grid, [](std::size_t, double x) { return cd(std::cos(x), 0.0); });
  auto samples = diamagnetic_samples(u, ws->pots, ws->grid);
  // cos vanishes at pi/2; whichever element straddles it is exempt only if a node lands very close.
  std::size_t exempt = 0;
  for (const auto& s : samples) exempt += s.exempt;
  EXPECT_LE(exempt, 2u);
  EXPECT_TRUE(diamagnetic_check(samples, 1.0).pass);
}

TEST(Nonexistence, EmptySetPasses) {
  Thresholds th;
  th.p = 4.0;
  th.C_p = 1.0;
  th.levels = {1.0};
  const AuditReport r = audit_nonexistence({}, th, 0.5, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.measured, 0.0);
}

TEST(Nonexistence, ConstantFamilyAndCorruptedControl) {
  auto ws = workspace(interval(1.0), "0", "1", 1e-2);
  const Spectrum s = eigenpairs(ws->sys, 2);
  const GnsConstants C = estimate_gns_constants(ws->graph, ws->grid, ws->pots, ws->sys, 4.0, 300);
  const Thresholds th = compute_thresholds(s, C, 4.0, 1, std::numeric_limits<double>::infinity(), false);
  std::vector<CriticalPoint> family;
  for (double c = 0.1; c <= 3.0; c += 0.1) family.push_back(constant_point(*ws, c));
  for (double cc : {0.25, 0.5, 1.0, 2.0}) EXPECT_TRUE(audit_nonexistence(family, th, cc, 1e-8).pass) << cc;
  for (const auto& cp : family)
    if (cp.lambda < 0) EXPECT_GE(cp.mass, th.mu_star(cp.lambda));

  // Halve the mass of a point with lambda < 0 close to the mu* curve.
  std::vector<CriticalPoint> bad = family;
  CriticalPoint& victim = bad.back();
  ASSERT_LT(victim.lambda, 0.0);
  ASSERT_LT(0.5 * victim.mass, th.mu_star(victim.lambda));
  victim.mass *= 0.5;
  const AuditReport r = audit_nonexistence(bad, th, 0.5, 1e-8);
  EXPECT_FALSE(r.pass);
  EXPECT_GE(r.measured, 1.0);
}

TEST(Multiplier, GroundBranchAndControls) {
  const IntervalRun& run = interval_run();
  const double l1 = run.spec.values[0];
  EXPECT_TRUE(audit_multiplier_ranges(run.res.points, l1, 1e-6, true).pass);
  auto bad = run.res.points;
  for (auto& cp : bad)
    if (cp.seed_index == 1) cp.lambda = l1 + 0.1;
  EXPECT_FALSE(audit_multiplier_ranges(bad, l1, 1e-6, true).pass);
  for (auto& cp : bad)
    if (cp.seed_index == 1) cp.lambda = -0.1;
  EXPECT_FALSE(audit_multiplier_ranges(bad, l1, 1e-6, true).pass);
  EXPECT_TRUE(audit_multiplier_ranges(bad, l1, 1e-6, false).pass);
}

TEST(Multiplier, ShiftedPotentialMapsBack) {
  const IntervalRun& run = interval_run();
  const double shift = 2.0;
  auto shifted = workspace(kInterval, "0", "3", 1e-2);
  const Spectrum s = eigenpairs(shifted->sys, 1);
  const BranchResult res = multi_branch(
      make_problem(shifted->graph, shifted->grid, shifted->pots, shifted->sys, 4.0, run.mu), s, SolverConfig{}, 1);
  const double l1 = run.spec.values[0];
  const AuditReport mapped = audit_multiplier_ranges(res.points, l1, 1e-6, true, shift);
  EXPECT_TRUE(mapped.pass);
  EXPECT_EQ(mapped.check, "multiplier_range_shifted");
  EXPECT_FALSE(audit_multiplier_ranges(res.points, l1, 1e-6, true).pass);
  EXPECT_NEAR(res.points[0].lambda - shift, run.res.points[0].lambda, 1e-9);
}

TEST(GaugeFlux, TreesLoopsAndFlux) {
  auto tree = workspace("a -- b : 1\nb -- c : 2\nb -- d : 0.5\n", "e0=3*x;e1=sin(x);e2=-1", "1+x", 1e-2);
  EXPECT_TRUE(audit_gauge_flux(tree->graph, tree->pots, without_magnetic(tree->pots), spectrum_on(tree->grid, 5),
                               1e-8)
                  .pass);

  const double a = 0.3;
  auto flat = workspace(kLoop, fmt17(a), "1", 1e-2);
  auto bump = workspace(kLoop, fmt17(a) + "*(1+cos(x))", "1", 1e-2);
  EXPECT_NEAR(edge_flux(flat->pots, 0), 2 * kPi * a, 1e-12);
  EXPECT_NEAR(edge_flux(bump->pots, 0), 2 * kPi * a, 1e-12);
  EXPECT_TRUE(audit_gauge_flux(flat->graph, bump->pots, flat->pots, spectrum_on(flat->grid, 5), 1e-8).pass);

  auto half = workspace(kLoop, "0.5", "1", 1e-2);  // flux pi
  auto zero = workspace(kLoop, "0", "1", 1e-2);
  const auto fn = spectrum_on(zero->grid, 4);
  EXPECT_TRUE(audit_gauge_flux(zero->graph, half->pots, zero->pots, fn, 1e-8, false).pass);
  const AuditReport same = audit_gauge_flux(zero->graph, half->pots, zero->pots, fn, 1e-8, true);
  EXPECT_FALSE(same.pass);
  // {1.25, 1.25, 3.25, 3.25} against {1, 2, 2, 5}: worst is |3.25 - 2| / 2.
  EXPECT_NEAR(same.measured, 0.625, 1e-3);
}

TEST(EnergyLevels, InterlacingAndSwappedControl) {
  const IntervalRun& run = interval_run();
  const auto lambdas = as_vector(run.spec.values);
  EXPECT_TRUE(audit_energy_levels(run.res.points, lambdas, run.mu, 1e-6).pass);
  auto bad = run.res.points;
  std::swap(bad[0].energy, bad[2].energy);
  EXPECT_FALSE(audit_energy_levels(bad, lambdas, run.mu, 1e-6).pass);
}

TEST(EnergyLevels, ConstantBranchClosedForm) {
  const double ell = kPi, mu = 1e-2;
  CriticalPoint cp;
  cp.seed_index = 1;
  cp.dichotomy = Dichotomy::MassReached;
  cp.energy = mu / 2 - mu * mu / (4 * ell);
  const AuditReport r = audit_energy_levels({cp}, {1.0, 2.0}, mu, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.measured, -mu * mu / (4 * ell), 1e-15);
}

TEST(Reports, DeterministicAndWellFormed) {
  const IntervalRun& run = interval_run();
  auto make = [&] {
    return std::vector<AuditReport>{
        audit_multiplier_ranges(run.res.points, run.spec.values[0], 1e-6, true),
        audit_energy_levels(run.res.points, as_vector(run.spec.values), run.mu, 1e-6),
        audit_diamagnetic(run.res.points[0].u, run.ws->pots, run.ws->grid)};
  };
  const std::string a = audit_csv(make(), {kAuditScope}), b = audit_csv(make(), {kAuditScope});
  EXPECT_EQ(a, b);
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "check,target_hash,pass,measured,bound,tol");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 3);

  EXPECT_EQ(points_hash(run.res.points), points_hash(run.res.points));
  auto bad = run.res.points;
  bad[0].mass *= 0.5;
  EXPECT_NE(points_hash(bad), points_hash(run.res.points));
}
