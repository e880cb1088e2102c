// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Criterion 11 is known to be unattainable (see README); it is run as stated
// and its failure does not change the exit status. Any other failure does.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magnograph/app.hpp"
#include "magnograph/audit.hpp"
#include "magnograph/csv.hpp"
#include "magnograph/eigensolver.hpp"
#include "magnograph/energy.hpp"
#include "magnograph/gns.hpp"
#include "magnograph/hermitian.hpp"
#include "magnograph/penalty.hpp"
#include "magnograph/snapshot.hpp"
#include "magnograph/solver.hpp"
#include "magnograph/thresholds.hpp"

namespace fs = std::filesystem;
using namespace magnograph;
using cd = std::complex<double>;

namespace {

const double kPi = std::acos(-1.0);
const double kInf = std::numeric_limits<double>::infinity();
const std::set<int> kUnattainable{11};

const std::string kInterval = "v0 -- v1 : 3.141592653589793\n";
const std::string kLoop = "v0 -- v0 : 6.283185307179586\n";
const std::string kTadpole = "v0 -- v0 : 6.283185307179586\nv0 -- v1 : 1\n";
const std::string kStar = "v0 -- v1 : 1 b\nv0 --> inf\nv0 --> inf\n";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::unique_ptr<Workspace> ws_of(const std::string& graph, const std::string& A, const std::string& V, double h,
                                 std::optional<double> L = std::nullopt, double flux = 0.0) {
  return make_workspace(parse_graph(graph), parse_potentials(A, V), h, L, flux);
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Eigen::VectorXcd scaled(Eigen::VectorXcd u, const HermitianSystem& sys, double mass) {
  return u * std::sqrt(mass / sys.mass(u));
}

Problem problem_of(const Workspace& ws, double p, double mu) {
  return make_problem(ws.graph, ws.grid, ws.pots, ws.sys, p, mu);
}

std::string random_expr(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-2.0, 2.0), k(0.2, 4.0);
  return num(a(rng)) + "+" + num(a(rng)) + "*sin(" + num(k(rng)) + "*x+" + num(a(rng)) + ")";
}

std::string random_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(1, 6), extra(0, 3);
  std::uniform_real_distribution<double> len(0.3, 3.0);
  const int n = nv(rng);
  std::string text;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    text += "v" + std::to_string(parent(rng)) + " -- v" + std::to_string(i) + " : " + num(len(rng)) + "\n";
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int e = extra(rng); e > 0; --e)
    text += "v" + std::to_string(pick(rng)) + " -- v" + std::to_string(pick(rng)) + " : " + num(len(rng)) + "\n";
  if (text.empty()) text = "v0 -- v0 : " + num(len(rng)) + "\n";
  if (extra(rng) == 0) text += "v0 --> inf\n";
  return text;
}

// 1. Neumann interval spectrum and second-order convergence.
Outcome spectral_oracle_interval() {
  const double exact[] = {1, 2, 5};
  double worst = 0.0;
  {
    auto ws = ws_of(kInterval, "0", "1", 1e-3);
    const Spectrum s = eigenpairs(ws->sys, 3);
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(s.values[j] - exact[j]) / exact[j]);
  }
  // lambda_1 is reproduced to rounding (constant eigenfunction), so the rate is read off lambda_2 and lambda_3.
  std::vector<std::array<double, 2>> err;
  for (double h : {2e-3, 1e-3, 5e-4}) {
    auto ws = ws_of(kInterval, "0", "1", h);
    const Spectrum s = eigenpairs(ws->sys, 3);
    err.push_back({std::abs(s.values[1] - 2.0), std::abs(s.values[2] - 5.0)});
  }
  double order_lo = kInf, order_hi = -kInf;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const double o = std::log2(err[i][j] / err[i + 1][j]);
      order_lo = std::min(order_lo, o);
      order_hi = std::max(order_hi, o);
    }
  const bool ok = worst <= 5e-4 && order_lo >= 1.8 && order_hi <= 2.2;
  return {ok, "max rel err " + num(worst) + " (<= 5e-4), observed order in [" + num(order_lo) + ", " +
                  num(order_hi) + "] (2.0 +- 0.2)"};
}

// 2. Loop with constant field: closed-form spectrum and 2 pi flux periodicity.
Outcome flux_oracle_loop() {
  double worst = 0.0, period = 0.0;
  for (double a : {0.0, 0.25, 0.5}) {
    std::vector<double> exact;
    for (int k = -4; k <= 4; ++k) exact.push_back(1.0 + (k - a) * (k - a));
    std::sort(exact.begin(), exact.end());
    auto ws = ws_of(kLoop, num(a), "1", 5e-3);
    auto shifted = ws_of(kLoop, num(a + 1.0), "1", 5e-3);  // flux + 2 pi
    const Spectrum s = eigenpairs(ws->sys, 6), t = eigenpairs(shifted->sys, 6);
    for (int j = 0; j < 6; ++j) {
      worst = std::max(worst, std::abs(s.values[j] - exact[static_cast<std::size_t>(j)]) / exact[j]);
      period = std::max(period, std::abs(s.values[j] - t.values[j]));
    }
  }
  return {worst <= 1e-3 && period <= 1e-8,
          "max rel err " + num(worst) + " (<= 1e-3), flux-period defect " + num(period) + " (<= 1e-8)"};
}

// 3. Exact Hermiticity on random graphs and potentials.
Outcome self_adjointness() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::uniform_real_distribution<double> h(0.02, 0.1);
    auto ws = ws_of(random_graph(rng), random_expr(rng), "1+(" + random_expr(rng) + ")^2", h(rng), 5.0);
    worst = std::max(worst, hermiticity_defect(ws->sys.S));
  }
  return {worst == 0.0, "max |S - S^H| over 20 random instances = " + num(worst)};
}

// 4. Diamagnetic inequality on 500 random probes.
Outcome diamagnetic_suite() {
  std::mt19937_64 rng(99);
  const std::string graphs[] = {kInterval, kLoop, kTadpole};
  int failures = 0, exempt = 0, elements = 0;
  for (int t = 0; t < 500; ++t) {
    auto ws = ws_of(graphs[t % 3], random_expr(rng), "1", 2e-2);
    Eigen::VectorXcd u;
    if (t % 2) {
      ProbeGenerator gen(ws->graph, ws->grid, rng());
      u = gen.smooth();
    } else {
      std::normal_distribution<double> nd;
      u.resize(ws->sys.dof_count);
      for (auto& z : u) z = cd(nd(rng), nd(rng));
    }
    const auto samples = diamagnetic_samples(u, ws->pots, ws->grid);
    for (const auto& s : samples) exempt += s.exempt;
    elements += static_cast<int>(samples.size());
    failures += !audit_diamagnetic(u, ws->pots, ws->grid).pass;
  }
  return {failures == 0, std::to_string(failures) + " failing probes of 500 (" + std::to_string(elements) +
                             " elements, " + std::to_string(exempt) + " exempt near zeros)"};
}

// 5. Empirical GNS constants hold on fresh probes.
Outcome gns_suite() {
  int violations = 0;
  std::string detail;
  for (const auto& [name, graph] : std::vector<std::pair<std::string, std::string>>{{"tadpole", kTadpole},
                                                                                   {"star", kStar}}) {
    auto ws = ws_of(graph, "0.3", "1", 1e-2, 20.0);
    GnsContext ctx(ws->graph, ws->grid, ws->pots, ws->sys);
    for (double p : {3.0, 4.0, 6.0}) {
      const GnsConstants C = estimate_gns_constants(ws->graph, ws->grid, ws->pots, ws->sys, p, 1000);
      ProbeGenerator fresh(ws->graph, ws->grid, 0xfeedULL + static_cast<std::uint64_t>(p));
      double worst = 0.0;
      for (int t = 0; t < 10000; ++t) {
        const double r = ctx.ratio_p(fresh.next(), p);
        worst = std::max(worst, r);
        violations += r > C.C_p;
      }
      detail += name + " p=" + num(p) + ": max ratio " + num(worst) + " vs C " + num(C.C_p) + "; ";
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in 60000 probes; " + detail};
}

// 6. Central differences of E_{r,mu} against the assembled gradient.
Outcome gradient_consistency() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::string graphs[] = {kInterval, kTadpole, kStar};
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto ws = ws_of(graphs[t % 3], random_expr(rng), "1+x/4", 5e-2, 6.0);
    ProbeGenerator gen(ws->graph, ws->grid, rng());
    const double p = 2.2 + 7.0 * unif(rng), mu = 0.05 + 3.0 * unif(rng), r = 1.2 + 60.0 * unif(rng);
    const Eigen::VectorXcd u = scaled(gen.smooth(), ws->sys, (0.1 + 0.85 * unif(rng)) * mu);
    const Eigen::VectorXcd v = scaled(gen.next(), ws->sys, mu);
    const auto params = make_energy_params(ws->graph, ws->grid, p, mu, r);
    const double exact = v.dot(gradient(ws->sys, u, params).g).real();
    const double step = 1e-5;
    const double fd =
        (energy(ws->sys, u + step * v, params).total - energy(ws->sys, u - step * v, params).total) / (2 * step);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  return {worst < 1e-5, "max relative FD mismatch " + num(worst) + " over 50 draws (< 1e-5)"};
}

// 7. Penalty identities on a 1000-point grid.
Outcome penalty_identities() {
  int violations = 0;
  for (double r : {2.0, 3.0, 8.0, 64.0}) {
    double prev = -1.0;
    for (int i = 1; i <= 1000; ++i) {
      const double s = i / 1001.0;
      violations += !(f_r_prime(s, r) * s > r * f_r(s, r));
      const double h = h_r(s, r);
      violations += !(h > prev);
      prev = h;
    }
    violations += f_r(0.0, r) != 0.0 || f_r_prime(0.0, r) != 0.0 || h_r(0.0, r) != 0.0;
  }
  return {violations == 0, std::to_string(violations) + " violations over 4000 samples and 4 boundary checks"};
}

// 8. Constant solutions of the cubic equation on an interval.
Outcome exact_family() {
  const double ell = 2.0, mu = 0.5, h = 1e-3;
  auto ws = ws_of("v0 -- v1 : 2\n", "0", "1", h);
  const auto start = sample_function(ws->grid, [&](std::size_t, double x) {
    return cd(1.0 + 0.1 * std::cos(kPi * x / ell), 0.05 * std::sin(kPi * x / ell));
  });
  const CriticalPoint cp = r_continuation(scaled(start, ws->sys, 0.9 * mu), problem_of(*ws, 4.0, mu), {});
  const double lam_err = std::abs(cp.lambda - (1.0 - mu / ell));
  const double mass_err = std::abs(cp.mass - mu) / mu;
  const bool ok = cp.dichotomy == Dichotomy::MassReached && mass_err <= 1e-6 && lam_err <= 1e-5 &&
                  cp.strong_residual <= 10 * h && cp.vertex_residual <= 10 * h;
  return {ok, "lambda err " + num(lam_err) + " (<= 1e-5), mass gap " + num(mass_err) + ", strong " +
                  num(cp.strong_residual) + " / vertex " + num(cp.vertex_residual) + " (<= 10h = " + num(10 * h) +
                  ")"};
}

// 9. Ground-branch multiplier and energy bound, four cases.
Outcome multiplier_energy() {
  bool ok = true;
  std::string detail;
  const double mu = 1e-2;
  for (const auto& [name, graph] : std::vector<std::pair<std::string, std::string>>{{"interval", kInterval},
                                                                                   {"tadpole", kTadpole}}) {
    for (double p : {4.0, 8.0}) {
      const auto t0 = std::chrono::steady_clock::now();
      auto ws = ws_of(graph, "0", "1", 5e-3);
      const Spectrum s = eigenpairs(ws->sys, 1);
      const BranchResult res = multi_branch(problem_of(*ws, p, mu), s, SolverConfig{}, 1);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double l1 = s.values[0];
      bool case_ok = res.points.size() == 1 && secs < 120.0;
      if (case_ok) {
        const CriticalPoint& cp = res.points[0];
        case_ok = cp.dichotomy == Dichotomy::MassReached && cp.lambda >= -1e-6 && cp.lambda <= l1 + 1e-6 &&
                  cp.energy <= mu * l1 / 2 + 1e-8;
        detail += name + " p=" + num(p) + ": lambda " + num(cp.lambda) + " in [-1e-6, " + num(l1) + "+1e-6], E-mu*l1/2 " +
                  num(cp.energy - mu * l1 / 2) + ", " + num(secs) + " s; ";
      }
      ok = ok && case_ok;
    }
  }
  return {ok, detail};
}

struct SolveRun {
  RunOptions opt;
  int code = -1;
  double seconds = 0.0;
};

SolveRun criterion10_solve(const fs::path& work, const std::string& tag) {
  SolveRun run;
  run.opt.command = "solve";
  run.opt.graph_path = (work / "interval.graph").string();
  run.opt.p = 4.0;
  run.opt.mu = 1e-2;
  run.opt.branches = 3;
  run.opt.h = 1e-3;
  run.opt.seed = 1;
  run.opt.out_dir = (work / tag).string();
  fs::remove_all(run.opt.out_dir);
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  run.code = run_solve(run.opt, log);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    rows.push_back(f);
  }
  return rows;
}

// 10. Three interlaced branches through the solve command.
Outcome multiplicity(const fs::path& work) {
  const SolveRun run = criterion10_solve(work, "c10");
  if (run.code != 0) return {false, "solve exited with " + std::to_string(run.code)};
  auto ws = make_workspace(load_graph(run.opt.graph_path), parse_potentials("0", "1"), run.opt.h, std::nullopt);
  const Spectrum s = eigenpairs(ws->sys, 3);
  const auto rows = csv_rows(read_text(run.opt.out_dir + "/solutions.csv"));
  if (rows.size() != 3) return {false, std::to_string(rows.size()) + " branches instead of 3"};
  const double mu = run.opt.mu;
  bool ok = run.seconds < 300.0;
  std::vector<Eigen::VectorXcd> fields;
  std::string detail;
  for (const auto& r : rows) {
    const int j = std::stoi(r[1]);
    const double lambda = std::stod(r[2]), E = std::stod(r[3]);
    const double lo = j > 1 ? mu * s.values[j - 2] / 2 : 0.0, hi = mu * s.values[j - 1] / 2;
    ok = ok && r[9] == "MassReached" && E > lo && E <= hi + 1e-6 && lambda <= s.values[j - 1] + 1e-6;
    detail += "E_" + std::to_string(j) + " in (" + num(lo) + ", " + num(hi) + "]: " + num(E) + "; ";
    fields.push_back(read_field_snapshot(read_text(run.opt.out_dir + "/" + r[10]), ws->grid).u);
  }
  double closest = kInf;
  for (std::size_t a = 0; a < fields.size(); ++a)
    for (std::size_t b = a + 1; b < fields.size(); ++b)
      closest = std::min(closest, orbit_distance(fields[a], fields[b], ws->sys.mass_diagonal));
  ok = ok && closest > 1e-3 * std::sqrt(mu);
  return {ok, detail + "min orbit distance " + num(closest) + " (> 1e-3 sqrt(mu)), " + num(run.seconds) + " s"};
}

// 11. Star graph below the noncompact threshold.
Outcome noncompact(const fs::path&) {
  const double p = 4.0;
  auto base = ws_of(kStar, "0", "1", 1e-2, 25.0);
  const Spectrum s = eigenpairs(base->sys, 2);
  const auto ess = essential_spectrum_surrogate(base->graph, base->grid, base->potentials);
  const GnsConstants C = estimate_gns_constants(base->graph, base->grid, base->pots, base->sys, p, 1000);
  const Thresholds th = compute_thresholds(s, C, p, 1, ess.value, ess.caveat);
  // The criterion asks for mu <= mu*_0. When that interval is empty the run
  // still goes ahead at a small mass so the report shows what happens.
  const bool admissible = th.mu_star_0 > 0.0;
  const double mu = admissible ? th.mu_star_0 : 0.05;
  std::vector<double> lambdas;
  bool reached = true, in_range = true;
  double l1_25 = 0.0;
  for (double L : {25.0, 50.0}) {
    auto ws = ws_of(kStar, "0", "1", 1e-2, L);
    const Spectrum sl = eigenpairs(ws->sys, 1);
    if (L == 25.0) l1_25 = sl.values[0];
    const BranchResult res = multi_branch(problem_of(*ws, p, mu), sl, SolverConfig{}, 1);
    if (res.points.empty()) return {false, "no branch converged at L_trunc " + num(L)};
    const CriticalPoint& cp = res.points[0];
    reached = reached && cp.dichotomy == Dichotomy::MassReached;
    in_range = in_range && cp.lambda >= 0.0 && cp.lambda < sl.values[0];
    lambdas.push_back(cp.lambda);
  }
  const double drift = std::abs(lambdas[1] - lambdas[0]);
  const bool ok = admissible && reached && in_range && drift < 1e-6;
  return {ok, "mu*_0 = " + num(th.mu_star_0) + " (lambda_1 " + num(l1_25) + " vs ess surrogate " + num(ess.value) +
                  ", delta_1 " + num(th.delta[0]) + ")" + (admissible ? "" : ", no admissible mu; ran at mu=0.05") +
                  "; lambda(L=25) " + num(lambdas[0]) + ", lambda(L=50) " + num(lambdas[1]) + ", drift " +
                  num(drift) + " (< 1e-6)"};
}

// 12. Nonexistence audit over a (mu, c) sweep, with corrupted controls.
Outcome nonexistence_sweep() {
  const double p = 4.0, grad_tol = 1e-8;
  auto ws = ws_of(kInterval, "0", "1", 1e-2);
  const Spectrum s = eigenpairs(ws->sys, 2);
  const GnsConstants C = estimate_gns_constants(ws->graph, ws->grid, ws->pots, ws->sys, p, 1000);
  const Thresholds th = compute_thresholds(s, C, p, 1, kInf, false);
  // Penalized branches have lambda >= 0 by construction; constrained
  // minimizers from projected gradient supply the lambda < 0 side.
  std::vector<CriticalPoint> points;
  int negative = 0;
  for (double mu : {0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0}) {
    const Problem prob = problem_of(*ws, p, mu);
    std::vector<CriticalPoint> found = multi_branch(prob, s, SolverConfig{}, 2).points;
    const Eigen::VectorXcd start = sample_function(ws->grid, [](std::size_t, double x) { return cd(1.0 + 0.3 * std::cos(x), 0.0); });
    found.push_back(projected_gradient(scaled(start, ws->sys, mu), prob));
    for (const auto& cp : found)
      if (cp.weak_residual <= grad_tol) {
        points.push_back(cp);
        negative += cp.lambda < 0;
      }
  }
  const std::vector<double> cs{0.1, 0.25, th.lambda_1() / 2, 1.0, 2.0};
  int bad_cells = 0;
  for (double c : cs) bad_cells += !audit_nonexistence(points, th, c, grad_tol).pass;

  // Control A: halve the mass of the negative-multiplier point nearest mu*.
  std::vector<CriticalPoint> control_a = points;
  CriticalPoint* victim = nullptr;
  for (auto& cp : control_a)
    if (cp.lambda < 0 && (!victim || cp.mass / th.mu_star(cp.lambda) < victim->mass / th.mu_star(victim->lambda)))
      victim = &cp;
  bool a_fails = false;
  if (victim) {
    victim->mass *= 0.5;
    a_fails = !audit_nonexistence(control_a, th, th.lambda_1() / 2, grad_tol).pass;
  }
  // Control B: a free critical point with small mass and energy.
  std::vector<CriticalPoint> control_b = points;
  CriticalPoint fake = points.front();
  fake.lambda = 0.0;
  fake.mass = 0.5 * th.mu_cp(th.lambda_1() / 2);
  fake.energy = 0.0;
  control_b.push_back(fake);
  const bool b_fails = !audit_nonexistence(control_b, th, th.lambda_1() / 2, grad_tol).pass;

  const bool ok = !points.empty() && bad_cells == 0 && victim && a_fails && b_fails;
  return {ok, std::to_string(points.size()) + " converged points (" + std::to_string(negative) + " with lambda < 0) x " + std::to_string(cs.size()) + " c values, " +
                  std::to_string(bad_cells) + " failing cells; mass-halved control " +
                  (victim ? (a_fails ? "fails" : "passes (bad)") : "unavailable") + ", free-point control " +
                  (b_fails ? "fails" : "passes (bad)") + "; C_4 " + num(th.C_p) + ", mu_0 " + num(th.mu_0)};
}

// 13. Byte-identical rerun of criterion 10.
Outcome determinism(const fs::path& work) {
  const SolveRun run = criterion10_solve(work, "c13");
  if (run.code != 0) return {false, "rerun exited with " + std::to_string(run.code)};
  const fs::path a = work / "c10", b = work / "c13";
  if (!fs::exists(a)) return {false, "criterion 10 output missing"};
  int compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;  // carries the start timestamp
    ++compared;
    if (!fs::exists(b / name) || read_text(entry.path().string()) != read_text((b / name).string())) ++differing;
  }
  return {compared > 0 && differing == 0, std::to_string(compared) + " artifacts compared (CSV, JSON, snapshots), " +
                                              std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string report_path = "acceptance_report.txt", work_dir = "acceptance_runs";
  std::set<int> only;
  app.add_option("--report", report_path, "report file");
  app.add_option("--work-dir", work_dir, "scratch directory for solve runs");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = fs::absolute(work_dir);
  fs::create_directories(work);
  write_text((work / "interval.graph").string(), kInterval);

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "spectral_oracle_interval", spectral_oracle_interval},
      {2, "flux_oracle_loop", flux_oracle_loop},
      {3, "self_adjointness", self_adjointness},
      {4, "diamagnetic_suite", diamagnetic_suite},
      {5, "gns_suite", gns_suite},
      {6, "gradient_consistency", gradient_consistency},
      {7, "penalty_identities", penalty_identities},
      {8, "exact_nls_family", exact_family},
      {9, "multiplier_energy_audits", multiplier_energy},
      {10, "multiplicity_interlacing", [&] { return multiplicity(work); }},
      {11, "noncompact_star", [&] { return noncompact(work); }},
      {12, "nonexistence_audit", nonexistence_sweep},
      {13, "determinism", [&] { return determinism(work); }},
  };
  const std::map<int, double> budget{{1, 10.0}, {2, 30.0}, {10, 300.0}};

  std::ostringstream report;
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (auto b = budget.find(c.id); b != budget.end() && secs >= b->second) {
      out.pass = false;
      out.detail += "; runtime budget " + num(b->second) + " s exceeded";
    }
    std::string line = std::string(out.pass ? "PASS" : "FAIL") + " " + std::to_string(c.id) + " " + c.name + " [" +
                       num(secs) + " s] " + out.detail;
    if (!out.pass && kUnattainable.count(c.id)) line += " (known unattainable; see README)";
    if (!out.pass && !kUnattainable.count(c.id)) ++unexpected;
    std::cout << line << std::endl;
    report << line << '\n';
  }
  write_text(report_path, report.str());
  return unexpected == 0 ? 0 : 1;
}
