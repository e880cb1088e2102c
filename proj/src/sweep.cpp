#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "app_detail.hpp"
#include "magnograph/csv.hpp"
#include "magnograph/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace magnograph {

using namespace detail;

namespace {

const char* kSweepHeader =
    "cell,p,mu,flux,converged,lambda,energy,mass,weak_residual,dichotomy,path,mu_0,mu_star_0,audit_pass,"
    "audit_summary";

struct SweepConfig {
  std::string graph_text;
  std::string A = "0", V = "1";
  double h = 1e-2;
  std::optional<double> L_trunc;
  std::vector<double> mu, p, flux{0.0};
  int branches = 1;
  std::uint64_t seed = 1;
  std::vector<double> r_schedule;
  int probes = 200;
  std::uint64_t gns_seed = 20240611;
};

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep config field '") + key + "': " + e.what());
  }
}

SweepConfig read_config(const std::string& path) {
  if (path.empty()) throw ValidationError("sweep needs --config");
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("sweep config must be a JSON object");
  SweepConfig c;
  if (j.contains("graph_text")) {
    c.graph_text = field_or<std::string>(j, "graph_text", "");
  } else if (j.contains("graph")) {
    fs::path g = field_or<std::string>(j, "graph", "");
    if (g.is_relative()) g = fs::path(path).parent_path() / g;
    c.graph_text = read_text(g.string());
  } else {
    throw ValidationError("sweep config needs 'graph' or 'graph_text'");
  }
  c.A = field_or(j, "A", c.A);
  c.V = field_or(j, "V", c.V);
  c.h = field_or(j, "h", c.h);
  if (j.contains("L_trunc") && !j.at("L_trunc").is_null()) c.L_trunc = field_or(j, "L_trunc", 0.0);
  c.mu = field_or(j, "mu", c.mu);
  c.p = field_or(j, "p", c.p);
  c.flux = field_or(j, "flux", c.flux);
  c.branches = field_or(j, "branches", c.branches);
  c.seed = field_or(j, "seed", c.seed);
  c.r_schedule = field_or(j, "r_schedule", c.r_schedule);
  c.probes = field_or(j, "probes", c.probes);
  c.gns_seed = field_or(j, "gns_seed", c.gns_seed);
  for (double p : c.p) check_p(p);
  for (double mu : c.mu) check_mu(mu);
  if (c.branches < 1) throw ValidationError("branches must be positive");
  return c;
}

json config_json(const SweepConfig& c) {
  json j = {{"graph_text", c.graph_text}, {"A", c.A},         {"V", c.V},          {"h", c.h},
            {"mu", c.mu},                 {"p", c.p},         {"flux", c.flux},    {"branches", c.branches},
            {"seed", c.seed},             {"probes", c.probes}, {"gns_seed", c.gns_seed}};
  j["L_trunc"] = c.L_trunc ? json(*c.L_trunc) : json(nullptr);
  j["r_schedule"] = c.r_schedule.empty() ? SolverConfig{}.r_schedule : c.r_schedule;
  return j;
}

struct Cell {
  std::size_t p_index, flux_index;
  double mu;
};

std::string run_cell(std::size_t index, const Cell& cell, const SweepConfig& c, const Workspace& ws,
                     const Spectrum& spec, const Thresholds& th) {
  const double p = c.p[cell.p_index];
  SolverConfig cfg;
  if (!c.r_schedule.empty()) cfg.r_schedule = c.r_schedule;
  cfg.seed = c.seed;
  const Problem prob = make_problem(ws.graph, ws.grid, ws.pots, ws.sys, p, cell.mu);
  BranchResult res;
  try {
    res = multi_branch(prob, spec, cfg, c.branches);
  } catch (const ConvergenceError&) {
  }
  std::ostringstream row;
  row << index << ',' << fmt17(p) << ',' << fmt17(cell.mu) << ',' << fmt17(c.flux[cell.flux_index]) << ',';
  // Report the branch seeded from the ground state when there is one.
  const CriticalPoint* best = nullptr;
  for (const auto& cp : res.points)
    if (!best || cp.seed_index < best->seed_index) best = &cp;
  const double nan = std::nan("");
  if (best) {
    row << "true," << fmt17(best->lambda) << ',' << fmt17(best->energy) << ',' << fmt17(best->mass) << ','
        << fmt17(best->weak_residual) << ',' << to_string(best->dichotomy) << ',';
  } else {
    row << "false," << fmt17(nan) << ',' << fmt17(nan) << ',' << fmt17(nan) << ',' << fmt17(nan) << ",none,";
  }
  row << "penalized," << fmt17(th.mu_0) << ',' << fmt17(th.mu_star_0) << ',';
  std::vector<AuditReport> reports;
  if (!res.points.empty()) {
    reports.push_back(audit_multiplier_ranges(res.points, spec.values[0], 1e-6, cell.mu <= th.mu_star_0));
    reports.push_back(audit_energy_levels(res.points, eigenvalues(spec), cell.mu, 1e-6));
  }
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const AuditReport& r) { return r.pass; });
  row << (reports.empty() ? "none" : ok ? "true" : "false") << ',';
  for (std::size_t i = 0; i < reports.size(); ++i)
    row << (i ? ";" : "") << reports[i].check << ':' << (reports[i].pass ? "pass" : "fail");
  return row.str();
}

}  // namespace

int run_sweep(const RunOptions& opt, std::ostream& log) {
  const SweepConfig c = read_config(opt.config_path);
  json manifest = {{"command", "sweep"}, {"tool_version", kToolVersion}, {"config", config_json(c)}};
  manifest["timestamps"] = make_manifest(opt, nullptr)["timestamps"];
  const std::string hash = persist_manifest(opt, manifest);

  std::vector<Cell> cells;
  for (std::size_t ip = 0; ip < c.p.size(); ++ip)
    for (std::size_t ifl = 0; ifl < c.flux.size(); ++ifl)
      for (double mu : c.mu) cells.push_back({ip, ifl, mu});

  std::vector<std::string> rows(cells.size());
  if (!cells.empty()) {
    const MetricGraph g = parse_graph(c.graph_text);
    const PotentialSpec pspec = parse_potentials(c.A, c.V);

    // Cells already on disk from an interrupted run with the same manifest.
    const fs::path cell_dir = fs::path(opt.out_dir) / "cells" / hash;
    std::vector<bool> done(cells.size(), false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const fs::path f = cell_dir / ("cell_" + std::to_string(i) + ".csv");
      if (fs::exists(f)) {
        std::string text = read_text(f.string());
        while (!text.empty() && text.back() == '\n') text.pop_back();
        rows[i] = text;
        done[i] = true;
      }
    }
    const auto resumed = static_cast<std::size_t>(std::count(done.begin(), done.end(), true));
    if (resumed) log << "resuming: " << resumed << " of " << cells.size() << " cells on disk\n";

    std::vector<std::unique_ptr<Workspace>> ws(c.flux.size());
    std::vector<Spectrum> spectra(c.flux.size());
    parallel_for(c.flux.size(), [&](std::size_t i) {
      ws[i] = make_workspace(g, pspec, c.h, c.L_trunc, c.flux[i]);
      spectra[i] = spectrum_with_levels(ws[i]->sys, c.branches, c.branches + 2);
    });
    const std::size_t pairs = c.p.size() * c.flux.size();
    std::vector<Thresholds> th(pairs);
    parallel_for(pairs, [&](std::size_t i) {
      const std::size_t ip = i / c.flux.size(), ifl = i % c.flux.size();
      th[i] = thresholds_for(*ws[ifl], spectra[ifl], c.p[ip], c.branches, c.probes, c.gns_seed);
    });

    parallel_for(cells.size(), [&](std::size_t i) {
      if (done[i]) return;
      const Cell& cell = cells[i];
      rows[i] = run_cell(i, cell, c, *ws[cell.flux_index], spectra[cell.flux_index],
                         th[cell.p_index * c.flux.size() + cell.flux_index]);
      write_text((cell_dir / ("cell_" + std::to_string(i) + ".csv")).string(), rows[i] + "\n");
    });
  }

  std::ostringstream csv;
  csv << "# manifest " << hash << '\n' << kSweepHeader << '\n';
  for (const auto& r : rows) csv << r << '\n';
  write_text((fs::path(opt.out_dir) / "sweep.csv").string(), csv.str());
  log << "sweep: " << cells.size() << " cells\n";
  return 0;
}

}  // namespace magnograph
