#include "magnograph/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magnograph/csv.hpp"
#include "magnograph/error.hpp"
#include "magnograph/hash.hpp"

namespace magnograph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

bool is_ground_seeded(const CriticalPoint& cp) { return cp.seed_index <= 1; }

}  // namespace

const char* const kAuditScope =
    "audits check necessary conditions on the supplied points only; the nonexistence audit can "
    "falsify the exclusion region but never confirms that no critical point lies inside it";

std::string audit_csv(const std::vector<AuditReport>& reports, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "check,target_hash,pass,measured,bound,tol\n";
  for (const auto& r : reports) {
    out << r.check << ',' << r.target_hash << ',' << (r.pass ? "true" : "false") << ',' << fmt17(r.measured) << ','
        << fmt17(r.bound) << ',' << fmt17(r.tol) << '\n';
  }
  return out.str();
}

std::string points_hash(const std::vector<CriticalPoint>& points) {
  Fnv1a h;
  h.add(static_cast<std::int64_t>(points.size()));
  for (const auto& cp : points) {
    h.add(cp.u);
    h.add(cp.lambda);
    h.add(cp.energy);
    h.add(cp.mass);
    h.add(cp.weak_residual);
    h.add(static_cast<std::int64_t>(cp.seed_index));
    h.add(static_cast<std::int64_t>(cp.dichotomy));
  }
  return hex_hash(h.value());
}

// ---------------------------------------------------------------------------

std::vector<DiamagneticSample> diamagnetic_samples(const GraphFunction& u, const PotentialPair& pots,
                                                   const GraphGrid& grid) {
  const Eigen::VectorXcd d = covariant_derivative(u, pots, grid);
  const auto off = element_offsets(grid);
  const double cutoff = 1e-8 * sup_norm(u);
  std::vector<DiamagneticSample> out;
  out.reserve(static_cast<std::size_t>(d.size()));
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    for (int j = 0; j < e.elements(); ++j) {
      const double a = std::abs(node_value(u, e, j));
      const double b = std::abs(node_value(u, e, j + 1));
      out.push_back({std::abs(b - a) / e.h, std::abs(d[off[k] + j]), e.h, std::min(a, b) < cutoff});
    }
  }
  return out;
}

AuditReport diamagnetic_check(const std::vector<DiamagneticSample>& samples, double u_sup, double C) {
  AuditReport r;
  r.check = "diamagnetic";
  Fnv1a h;
  double worst = -kInf, worst_slack = 0.0;
  int violations = 0, exempt = 0;
  for (const auto& s : samples) {
    h.add(s.modulus_slope);
    h.add(s.covariant);
    h.add(s.h);
    h.add(static_cast<std::int64_t>(s.exempt));
    if (s.exempt) {
      ++exempt;
      continue;
    }
    const double slack = C * s.h * u_sup;
    const double excess = s.modulus_slope - s.covariant;
    if (excess > slack) ++violations;
    if (excess - slack > worst - worst_slack) {
      worst = excess;
      worst_slack = slack;
    }
  }
  h.add(u_sup);
  h.add(C);
  r.target_hash = hex_hash(h.value());
  r.measured = samples.empty() || exempt == static_cast<int>(samples.size()) ? 0.0 : worst;
  r.bound = 0.0;
  r.tol = worst_slack;
  r.pass = violations == 0;
  r.notes = std::to_string(samples.size()) + " elements, " + std::to_string(exempt) + " exempt, " +
            std::to_string(violations) + " violations";
  return r;
}

AuditReport audit_diamagnetic(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid, double C) {
  const double sup = sup_norm(u);
  if (!(sup > 0.0)) throw ValidationError("diamagnetic audit needs a nonzero field");
  return diamagnetic_check(diamagnetic_samples(u, pots, grid), sup, C);
}

// ---------------------------------------------------------------------------

AuditReport audit_nonexistence(const std::vector<CriticalPoint>& points, const Thresholds& th, double c,
                               double grad_tol) {
  AuditReport r;
  r.check = "nonexistence";
  const double mu_c = th.mu_cp(c);
  const bool star_part = th.p > 2.0 && th.p < 6.0;
  int violations = 0, checked_star = 0;
  double min_ratio = kInf;  // mass / mu*_{lambda,p} over points with lambda < 0
  for (const auto& cp : points) {
    // ||E'(u)|| lies within |lambda| +- weak_residual; treat the point as free
    // whenever the lower end reaches grad_tol, which errs towards flagging.
    const bool possibly_free = std::abs(cp.lambda) - cp.weak_residual <= grad_tol;
    if (possibly_free && cp.mass < mu_c && cp.energy <= c * mu_c) ++violations;
    if (star_part && cp.lambda < 0.0 && cp.weak_residual <= grad_tol) {
      ++checked_star;
      const double ms = th.mu_star(cp.lambda);
      min_ratio = std::min(min_ratio, cp.mass / ms);
      if (cp.mass < ms) ++violations;
    }
  }
  Fnv1a h;
  h.add(points_hash(points));
  h.add(th.p);
  h.add(th.C_p);
  h.add(th.lambda_1());
  h.add(c);
  h.add(grad_tol);
  r.target_hash = hex_hash(h.value());
  r.measured = violations;
  r.bound = 0.0;
  r.tol = 0.0;
  r.pass = violations == 0;
  r.notes = "mu_c=" + short_num(mu_c) + ", " + std::to_string(points.size()) + " points, " +
            std::to_string(checked_star) + " with lambda<0";
  if (checked_star > 0) r.notes += ", min mass/mu*=" + short_num(min_ratio);
  r.notes += "; falsification only";
  return r;
}

// ---------------------------------------------------------------------------

AuditReport audit_multiplier_ranges(const std::vector<CriticalPoint>& points, double lambda_1, double tol,
                                    bool small_mu, double shift) {
  AuditReport r;
  r.check = shift == 0.0 ? "multiplier_range" : "multiplier_range_shifted";
  double worst = -kInf;
  int counted = 0;
  for (const auto& cp : points) {
    if (cp.dichotomy != Dichotomy::MassReached || !is_ground_seeded(cp)) continue;
    ++counted;
    const double lam = cp.lambda - shift;
    worst = std::max(worst, lam - lambda_1);
    if (small_mu) worst = std::max(worst, -lam);
  }
  Fnv1a h;
  h.add(points_hash(points));
  h.add(lambda_1);
  h.add(tol);
  h.add(static_cast<std::int64_t>(small_mu));
  h.add(shift);
  r.target_hash = hex_hash(h.value());
  r.measured = counted ? worst : 0.0;
  r.bound = 0.0;
  r.tol = tol;
  r.pass = !(r.measured > tol);
  r.notes = std::to_string(counted) + " ground-seeded MassReached points, lambda_1=" + short_num(lambda_1);
  return r;
}

// ---------------------------------------------------------------------------

double edge_flux(const PotentialPair& pots, std::size_t edge_index) { return pots.edges.at(edge_index).phase.sum(); }

AuditReport audit_gauge_flux(const MetricGraph& g, const PotentialPair& pots, const PotentialPair& reference,
                             const SpectrumFn& spectrum, double tol, bool expect_equal) {
  AuditReport r;
  r.check = expect_equal ? "gauge_equal_spectra" : "flux_distinct_spectra";
  const Eigen::VectorXd a = spectrum(pots);
  const Eigen::VectorXd b = spectrum(reference);
  const Eigen::Index n = std::min(a.size(), b.size());
  double diff = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) diff = std::max(diff, std::abs(a[j] - b[j]) / std::max(1.0, std::abs(b[j])));
  Fnv1a h;
  for (const auto& e : pots.edges) h.add(e.phase);
  h.add(pots.V);
  for (const auto& e : reference.edges) h.add(e.phase);
  h.add(reference.V);
  h.add(tol);
  r.target_hash = hex_hash(h.value());
  r.measured = diff;
  r.bound = 0.0;
  r.tol = tol;
  r.pass = expect_equal ? diff <= tol : diff > tol;
  r.notes = std::string(cycle_rank(g) == 0 ? "tree" : "cycle rank " + std::to_string(cycle_rank(g))) + ", " +
            std::to_string(n) + " eigenvalues compared";
  return r;
}

// ---------------------------------------------------------------------------

AuditReport audit_energy_levels(const std::vector<CriticalPoint>& points, const std::vector<double>& lambdas,
                                double mu, double tol) {
  AuditReport r;
  r.check = "energy_levels";
  double worst = -kInf, min_slack = kInf;
  int counted = 0;
  bool ok = true;
  for (const auto& cp : points) {
    const int j = cp.seed_index;
    if (j < 1 || j > static_cast<int>(lambdas.size())) continue;
    ++counted;
    const double upper = 0.5 * mu * lambdas[static_cast<std::size_t>(j - 1)];
    const double up_excess = cp.energy - upper - tol;
    worst = std::max(worst, up_excess);
    min_slack = std::min(min_slack, upper - cp.energy);
    if (up_excess > 0.0) ok = false;
    if (j >= 2) {
      const double lower = 0.5 * mu * lambdas[static_cast<std::size_t>(j - 2)];
      worst = std::max(worst, lower - cp.energy);
      min_slack = std::min(min_slack, cp.energy - lower);
      if (!(cp.energy > lower)) ok = false;
    }
  }
  Fnv1a h;
  h.add(points_hash(points));
  for (double l : lambdas) h.add(l);
  h.add(mu);
  h.add(tol);
  r.target_hash = hex_hash(h.value());
  r.measured = counted ? worst : 0.0;
  r.bound = 0.0;
  r.tol = tol;
  r.pass = ok;
  r.notes = std::to_string(counted) + " branches";
  if (counted) r.notes += ", smallest slack " + short_num(min_slack);
  return r;
}

}  // namespace magnograph
