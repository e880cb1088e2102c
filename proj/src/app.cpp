#include "magnograph/app.hpp"

#include "app_detail.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "magnograph/audit.hpp"
#include "magnograph/csv.hpp"
#include "magnograph/energy.hpp"
#include "magnograph/error.hpp"
#include "magnograph/gns.hpp"
#include "magnograph/hash.hpp"
#include "magnograph/snapshot.hpp"
#include "magnograph/solver.hpp"
#include "magnograph/thresholds.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace magnograph {

// --- plumbing ---------------------------------------------------------------

void write_text(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  // Write then rename, so an interrupted run never leaves a half-written file.
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw ValidationError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MetricGraph load_graph(const std::string& path) {
  if (path.empty()) throw ValidationError("--graph is required");
  return parse_graph(read_text(path));
}

PotentialSpec parse_potentials(const std::string& A, const std::string& V) {
  PotentialSpec spec;
  parse_potential_argument(A, spec.A_default, spec.A_edges);
  parse_potential_argument(V, spec.V_default, spec.V_edges);
  return spec;
}

PotentialPair add_uniform_flux(const GraphGrid& grid, const PotentialPair& pots, double flux) {
  double total = 0.0;
  for (const auto& e : grid.edges)
    if (!e.half_line) total += e.length;
  PotentialPair out = pots;
  if (flux == 0.0) return out;
  if (total <= 0.0) throw ValidationError("flux needs at least one bounded edge");
  const double a = flux / total;
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    if (grid.edges[k].half_line) continue;
    out.edges[k].phase.array() += a * grid.edges[k].h;
    out.edges[k].A_node.array() += a;
  }
  return out;
}

std::unique_ptr<Workspace> make_workspace(const MetricGraph& g, const PotentialSpec& spec, double h,
                                          std::optional<double> L_trunc, double flux) {
  if (!(h > 0.0)) throw ValidationError("--h must be positive");
  const double L = L_trunc ? *L_trunc : default_truncation_length(g);
  if (!(L > 0.0)) throw ValidationError("--L-trunc must be positive");
  auto ws = std::make_unique<Workspace>();
  ws->graph = g;
  ws->grid = build_grid(g, h, L);
  ws->potentials = spec;
  ws->pots = add_uniform_flux(ws->grid, sample_potentials(ws->grid, spec), flux);
  ws->sys = assemble(ws->grid, ws->pots);
  ws->flux = flux;
  return ws;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ParseError("range '" + text + "' is not start:stop:count");
  double a, b;
  long n;
  try {
    std::size_t used = 0;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::logic_error&) {
    throw ParseError("range '" + text + "' is not start:stop:count");
  }
  if (n < 1) throw ValidationError("range count must be at least 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

int worker_count(std::size_t jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MAGNOGRAPH_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) n = v;
    } catch (const std::logic_error&) {
    }
  }
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

json make_manifest(const RunOptions& opt, const Workspace* ws) {
  json m;
  m["command"] = opt.command;
  m["tool_version"] = kToolVersion;
  if (ws) {
    m["graph_hash"] = hex_hash([&] {
      Fnv1a h;
      h.add(serialize_graph(ws->graph));
      return h.value();
    }());
    m["grid"] = {{"h", opt.h},
                 {"L_trunc", ws->grid.truncation_length},
                 {"dof_count", ws->grid.dof_count},
                 {"grid_hash", hex_hash(grid_hash(ws->grid))}};
    m["potentials"] = ws->potentials.descriptor();
  }
  json params = {{"p", opt.p}, {"mu", opt.mu}, {"branches", opt.branches}, {"k", opt.k}};
  params["r_schedule"] = opt.r_schedule.empty() ? SolverConfig{}.r_schedule : opt.r_schedule;
  if (!opt.flux_sweep.empty()) params["flux_sweep"] = opt.flux_sweep;
  if (opt.command == "thresholds" || opt.command == "solve" || opt.command == "verify") {
    params["probes"] = opt.probes;
    params["c_values"] = opt.c_values;
    params["lambda_values"] = opt.lambda_values;
  }
  m["params"] = params;
  m["seeds"] = {{"solver", opt.seed}, {"gns", opt.gns_seed}};
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["timestamps"] = {{"started", stamp}};
  return m;
}

std::string manifest_hash(const json& manifest) {
  json copy = manifest;
  copy.erase("timestamps");
  copy.erase("manifest_hash");
  Fnv1a h;
  h.add(copy.dump());
  return hex_hash(h.value());
}

namespace detail {

std::string path_in(const RunOptions& opt, const std::string& name) { return (fs::path(opt.out_dir) / name).string(); }

// Writes manifest.json and returns its hash.
std::string persist_manifest(const RunOptions& opt, json manifest) {
  const std::string hash = manifest_hash(manifest);
  manifest["manifest_hash"] = hash;
  write_text(path_in(opt, "manifest.json"), manifest.dump(2) + "\n");
  return hash;
}

std::unique_ptr<Workspace> workspace_for(const RunOptions& opt, double flux = 0.0) {
  return make_workspace(load_graph(opt.graph_path), parse_potentials(opt.A, opt.V), opt.h, opt.L_trunc, flux);
}

SolverConfig solver_config(const RunOptions& opt) {
  SolverConfig cfg;
  if (!opt.r_schedule.empty()) cfg.r_schedule = opt.r_schedule;
  cfg.seed = opt.seed;
  cfg.validate();
  return cfg;
}

void check_p(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw ValidationError("p must exceed 2");
}

void check_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive");
}

// Enough eigenpairs to see `levels` distinct clusters, growing on demand.
Spectrum spectrum_with_levels(const HermitianSystem& sys, int levels, int at_least) {
  int want = std::max(at_least, levels + 2);
  for (;;) {
    want = std::min(want, sys.dof_count);
    Spectrum s = eigenpairs(sys, want);
    if (s.cluster_count() > levels || want == sys.dof_count) return s;
    want *= 2;
  }
}

Thresholds thresholds_for(const Workspace& ws, const Spectrum& spec, double p, int levels, int probes,
                          std::uint64_t gns_seed) {
  const GnsConstants c = estimate_gns_constants(ws.graph, ws.grid, ws.pots, ws.sys, p, probes, gns_seed);
  const auto ess = essential_spectrum_surrogate(ws.graph, ws.grid, ws.potentials);
  return compute_thresholds(spec, c, p, levels, ess.value, ess.caveat);
}

std::vector<double> eigenvalues(const Spectrum& s) { return {s.values.data(), s.values.data() + s.values.size()}; }

std::vector<AuditReport> solution_audits(const Workspace& ws, const std::vector<CriticalPoint>& pts,
                                         const Spectrum& spec, const Thresholds& th, double mu, double grad_tol) {
  std::vector<AuditReport> reports;
  const bool small_mu = mu <= th.mu_star_0;
  reports.push_back(audit_multiplier_ranges(pts, spec.values[0], 1e-6, small_mu));
  reports.push_back(audit_energy_levels(pts, eigenvalues(spec), mu, 1e-6));
  reports.push_back(audit_nonexistence(pts, th, 0.5 * th.lambda_1(), grad_tol));
  for (const auto& cp : pts) {
    AuditReport r = audit_diamagnetic(cp.u, ws.pots, ws.grid);
    r.check += "_" + cp.branch;
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string audit_file(const std::vector<AuditReport>& reports, const std::string& hash) {
  return audit_csv(reports, {"manifest " + hash, kAuditScope});
}

void log_audits(std::ostream& log, const std::vector<AuditReport>& reports) {
  for (const auto& r : reports)
    log << (r.pass ? "PASS " : "FAIL ") << r.check << " measured=" << fmt17(r.measured) << " tol=" << fmt17(r.tol)
        << " (" << r.notes << ")\n";
}

Dichotomy dichotomy_from(const std::string& s) {
  for (Dichotomy d : {Dichotomy::MassReached, Dichotomy::MassStagnated, Dichotomy::Unconstrained})
    if (to_string(d) == s) return d;
  throw ParseError("unknown dichotomy '" + s + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number '" + s + "'");
  }
}

const char* kSolutionHeader =
    "branch,seed_index,lambda,energy,mass,weak_residual,strong_residual,vertex_residual,r_final,dichotomy,snapshot";

}  // namespace detail

using namespace detail;

// --- spectrum ---------------------------------------------------------------

int run_spectrum(const RunOptions& opt, std::ostream& log) {
  if (opt.k < 1) throw ValidationError("k must be positive");
  auto ws = workspace_for(opt);
  if (opt.k > ws->grid.dof_count)
    throw ValidationError("k = " + std::to_string(opt.k) + " exceeds the " + std::to_string(ws->grid.dof_count) +
                          " degrees of freedom");
  const std::string hash = persist_manifest(opt, make_manifest(opt, ws.get()));
  const Spectrum s = eigenpairs(ws->sys, opt.k);
  std::ostringstream csv;
  csv << "# manifest " << hash << "\nj,lambda,residual,cluster_id\n";
  for (int j = 0; j < s.size(); ++j)
    csv << j + 1 << ',' << fmt17(s.values[j]) << ',' << fmt17(s.residuals[j]) << ',' << s.cluster[j] << '\n';
  write_text(path_in(opt, "spectrum.csv"), csv.str());
  for (int j = 0; j < s.size(); ++j) log << "lambda_" << j + 1 << " = " << fmt17(s.values[j]) << '\n';

  if (opt.eigenvectors) {
    for (int j = 0; j < s.size(); ++j) {
      SnapshotHeader hd{hex_hash(grid_hash(ws->grid)), 0.0, 0.0, s.values[j]};
      write_text(path_in(opt, "eigvec_" + std::to_string(j + 1) + ".snap"),
                 "# manifest " + hash + "\n" + write_field_snapshot(s.vectors.col(j), ws->grid, hd));
    }
  }

  if (!opt.flux_sweep.empty()) {
    const auto fluxes = parse_range(opt.flux_sweep);
    const MetricGraph g = load_graph(opt.graph_path);
    const PotentialSpec pspec = parse_potentials(opt.A, opt.V);
    std::vector<Eigen::VectorXd> rows(fluxes.size());
    parallel_for(fluxes.size(), [&](std::size_t i) {
      auto fw = make_workspace(g, pspec, opt.h, opt.L_trunc, fluxes[i]);
      rows[i] = eigenpairs(fw->sys, opt.k).values;
    });
    std::ostringstream fcsv;
    fcsv << "# manifest " << hash << "\nflux";
    for (int j = 0; j < opt.k; ++j) fcsv << ",lambda_" << j + 1;
    fcsv << '\n';
    for (std::size_t i = 0; i < fluxes.size(); ++i) {
      fcsv << fmt17(fluxes[i]);
      for (Eigen::Index j = 0; j < rows[i].size(); ++j) fcsv << ',' << fmt17(rows[i][j]);
      fcsv << '\n';
    }
    write_text(path_in(opt, "flux.csv"), fcsv.str());
    log << "flux sweep: " << fluxes.size() << " values\n";
  }
  return 0;
}

// --- solve ------------------------------------------------------------------

int run_solve(const RunOptions& opt, std::ostream& log) {
  check_p(opt.p);
  check_mu(opt.mu);
  if (opt.branches < 1) throw ValidationError("branches must be positive");
  const SolverConfig cfg = solver_config(opt);
  auto ws = workspace_for(opt);
  if (opt.branches > ws->grid.dof_count) throw ValidationError("more branches than degrees of freedom");
  const std::string hash = persist_manifest(opt, make_manifest(opt, ws.get()));

  const Spectrum spec = spectrum_with_levels(ws->sys, opt.branches, opt.branches + 2);
  const Problem prob = make_problem(ws->graph, ws->grid, ws->pots, ws->sys, opt.p, opt.mu);
  // The penalized continuation is used for every p; above p = 6 it is the
  // only route, since the constrained energy is unbounded below there.
  BranchResult res = multi_branch(prob, spec, cfg, opt.branches);

  std::ostringstream csv;
  csv << "# manifest " << hash << '\n';
  for (const auto& n : res.notes) csv << "# note " << n << '\n';
  csv << kSolutionHeader << '\n';
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const CriticalPoint& cp = res.points[i];
    const std::string snap = "branch_" + std::to_string(i + 1) + ".snap";
    SnapshotHeader hd{hex_hash(grid_hash(ws->grid)), opt.mu, opt.p, cp.lambda};
    write_text(path_in(opt, snap), "# manifest " + hash + "\n" + write_field_snapshot(cp.u, ws->grid, hd));
    json bundle = {{"manifest_hash", hash}, {"mu", opt.mu}, {"p", opt.p}, {"lambda", cp.lambda},
                   {"energy", cp.energy}, {"mass", cp.mass}, {"branch", cp.branch}, {"r_final", cp.r_final},
                   {"dichotomy_flag", to_string(cp.dichotomy)}, {"snapshot", snap}};
    bundle["residuals"] = {{"weak", cp.weak_residual},
                           {"strong", cp.strong_residual},
                           {"vertex", cp.vertex_residual},
                           {"per_vertex", cp.vertex_residuals}};
    write_text(path_in(opt, "branch_" + std::to_string(i + 1) + ".json"), bundle.dump(2) + "\n");
    csv << cp.branch << ',' << cp.seed_index << ',' << fmt17(cp.lambda) << ',' << fmt17(cp.energy) << ','
        << fmt17(cp.mass) << ',' << fmt17(cp.weak_residual) << ',' << fmt17(cp.strong_residual) << ','
        << fmt17(cp.vertex_residual) << ',' << fmt17(cp.r_final) << ',' << to_string(cp.dichotomy) << ',' << snap
        << '\n';
    log << cp.branch << ": lambda=" << fmt17(cp.lambda) << " E=" << fmt17(cp.energy) << " mass=" << fmt17(cp.mass)
        << ' ' << to_string(cp.dichotomy) << '\n';
  }
  write_text(path_in(opt, "solutions.csv"), csv.str());
  for (const auto& n : res.notes) log << "note: " << n << '\n';
  if (res.points.empty()) throw ConvergenceError("no branch converged");

  const Thresholds th = thresholds_for(*ws, spec, opt.p, opt.branches, opt.probes, opt.gns_seed);
  const auto reports = solution_audits(*ws, res.points, spec, th, opt.mu, cfg.grad_tol);
  write_text(path_in(opt, "audit.csv"), audit_file(reports, hash));
  log_audits(log, reports);
  return 0;
}

// --- verify -----------------------------------------------------------------

int run_verify(const RunOptions& opt, std::ostream& log) {
  check_p(opt.p);
  check_mu(opt.mu);
  if (opt.bundle_dir.empty()) throw ValidationError("verify needs --bundle");
  auto ws = workspace_for(opt);
  const std::string hash = persist_manifest(opt, make_manifest(opt, ws.get()));

  std::vector<CriticalPoint> pts;
  std::istringstream in(read_text((fs::path(opt.bundle_dir) / "solutions.csv").string()));
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kSolutionHeader) throw ParseError("unexpected solutions.csv header");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 11) throw ParseError("solutions.csv row has " + std::to_string(f.size()) + " fields");
    CriticalPoint cp;
    cp.branch = f[0];
    cp.seed_index = static_cast<int>(to_double(f[1]));
    cp.lambda = to_double(f[2]);
    cp.energy = to_double(f[3]);
    cp.mass = to_double(f[4]);
    cp.weak_residual = to_double(f[5]);
    cp.strong_residual = to_double(f[6]);
    cp.vertex_residual = to_double(f[7]);
    cp.r_final = to_double(f[8]);
    cp.dichotomy = dichotomy_from(f[9]);
    cp.u = read_field_snapshot(read_text((fs::path(opt.bundle_dir) / f[10]).string()), ws->grid).u;
    pts.push_back(std::move(cp));
  }
  if (!header) throw ParseError("solutions.csv has no header");
  int levels = 1;
  for (const auto& cp : pts) levels = std::max(levels, cp.seed_index);
  const Spectrum spec = spectrum_with_levels(ws->sys, levels, levels + 2);
  const Thresholds th = thresholds_for(*ws, spec, opt.p, levels, opt.probes, opt.gns_seed);
  const auto reports = solution_audits(*ws, pts, spec, th, opt.mu, SolverConfig{}.grad_tol);
  write_text(path_in(opt, "verify_audit.csv"), audit_file(reports, hash));
  log_audits(log, reports);
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const AuditReport& r) { return r.pass; });
  return ok ? 0 : 1;
}

// --- thresholds ---------------------------------------------------------------

int run_thresholds(const RunOptions& opt, std::ostream& log) {
  check_p(opt.p);
  if (opt.k < 1) throw ValidationError("k must be positive");
  auto ws = workspace_for(opt);
  const std::string hash = persist_manifest(opt, make_manifest(opt, ws.get()));
  const Spectrum spec = spectrum_with_levels(ws->sys, opt.k, opt.k + 2);
  const Thresholds th = thresholds_for(*ws, spec, opt.p, opt.k, opt.probes, opt.gns_seed);

  // Every row depends on the spectrum, the constants and p; the hash pins them.
  Fnv1a ih;
  ih.add(hash);
  for (double l : th.levels) ih.add(l);
  ih.add(th.C_p);
  ih.add(th.C_inf);
  ih.add(th.p);
  ih.add(th.ess_surrogate);
  const std::string inputs = hex_hash(ih.value());
  const std::string emp = "empirical(probes=" + std::to_string(opt.probes) + ";safety=1.05)";
  const std::string ess_prov = th.ess_caveat ? "tail-estimate" : "compact";
  std::ostringstream csv;
  csv << "# manifest " << hash << '\n';
  csv << "# constants are lower-bound estimates inflated by 5%; every threshold built on them inherits that\n";
  if (th.ess_caveat) csv << "# essential spectrum bottom is a tail-limit estimate\n";
  csv << "name,value,inputs_hash,constant_provenance\n";
  auto row = [&](const std::string& name, double v, const std::string& prov) {
    csv << name << ',' << fmt17(v) << ',' << inputs << ',' << prov << '\n';
  };
  row("C_p", th.C_p, emp);
  row("C_inf", th.C_inf, emp);
  row("ess_surrogate", th.ess_surrogate, ess_prov);
  for (std::size_t j = 0; j < th.levels.size(); ++j) {
    const std::string i = "[" + std::to_string(j + 1) + "]";
    row("lambda" + i, th.levels[j], "spectral");
    row("mu_tilde" + i, th.mu_tilde[j], emp);
    row("delta" + i, th.delta[j], th.ess_caveat ? "tail-estimate" : "spectral");
    row("mu_double_star" + i, th.mu_double_star[j], emp + "+" + ess_prov);
    row("mu_star_level" + i, th.mu_star_level[j], emp);
  }
  row("mu_0", th.mu_0, emp);
  row("mu_star_0", th.mu_star_0, emp);
  for (double c : opt.c_values) row("mu_cp(c=" + fmt17(c) + ")", th.mu_cp(c), emp);
  if (th.p < 6.0)
    for (double l : opt.lambda_values) row("mu_star(lambda=" + fmt17(l) + ")", th.mu_star(l), emp);
  write_text(path_in(opt, "thresholds.csv"), csv.str());
  log << "C_p=" << fmt17(th.C_p) << " C_inf=" << fmt17(th.C_inf) << " mu_0=" << fmt17(th.mu_0)
      << " mu_star_0=" << fmt17(th.mu_star_0) << '\n';
  return 0;
}

// --- graph check --------------------------------------------------------------

int run_graph_check(const RunOptions& opt, std::ostream& log) {
  const MetricGraph g = load_graph(opt.graph_path);
  std::size_t half = 0;
  for (const auto& e : g.edges()) half += e.is_half_line();
  log << "vertices " << g.vertices().size() << "\nedges " << g.edges().size() << " (" << half << " half-lines)\n"
      << "compact " << (is_compact(g) ? "yes" : "no") << "\ncycle_rank " << cycle_rank(g) << "\nnonlinearity";
  for (const auto& id : g.region_edges()) log << ' ' << id;
  log << '\n';
  for (const auto& v : g.vertices()) {
    log << "vertex " << v.id << " degree " << incident_edges(g, v.id).size() << '\n';
  }
  return 0;
}

}  // namespace magnograph
