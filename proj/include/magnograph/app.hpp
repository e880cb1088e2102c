#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "magnograph/eigensolver.hpp"
#include "magnograph/graph.hpp"
#include "magnograph/grid.hpp"
#include "magnograph/hermitian.hpp"
#include "magnograph/potential.hpp"

namespace magnograph {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a subcommand reads. Defaults match the CLI defaults.
struct RunOptions {
  std::string command;
  std::string graph_path;
  std::string A = "0";
  std::string V = "1";
  double p = 4.0;
  double mu = 0.5;
  int branches = 1;
  int k = 3;  // eigenpairs for `spectrum`, levels for `thresholds`
  double h = 1e-3;
  std::optional<double> L_trunc;
  std::vector<double> r_schedule;  // empty: solver default
  std::uint64_t seed = 1;
  std::string out_dir = "magnograph_out";
  std::string flux_sweep;  // "start:stop:count", total flux over bounded edges
  bool eigenvectors = false;
  int probes = 1000;
  std::uint64_t gns_seed = 20240611;
  std::vector<double> c_values{0.25, 0.5, 1.0, 2.0};
  std::vector<double> lambda_values{-0.5, -1.0, -2.0, -4.0};
  std::string config_path;  // sweep
  std::string bundle_dir;   // verify
};

/// Graph, grid, potentials and assembled operator for one run. Held behind a
/// pointer because solver problems keep addresses into it.
struct Workspace {
  MetricGraph graph;
  GraphGrid grid;
  PotentialSpec potentials;
  PotentialPair pots;
  HermitianSystem sys;
  double flux = 0.0;
};

MetricGraph load_graph(const std::string& path);
PotentialSpec parse_potentials(const std::string& A, const std::string& V);

/// Builds grid and operator. `flux` adds a constant A = flux / (total bounded
/// length) on every bounded edge, so a single cycle through all bounded edges
/// encloses exactly `flux` more.
std::unique_ptr<Workspace> make_workspace(const MetricGraph& g, const PotentialSpec& spec, double h,
                                          std::optional<double> L_trunc, double flux = 0.0);

PotentialPair add_uniform_flux(const GraphGrid& grid, const PotentialPair& pots, double flux);

/// Run manifest. `timestamps` is informational and left out of the hash, as
/// is the output directory.
nlohmann::json make_manifest(const RunOptions& opt, const Workspace* ws);
std::string manifest_hash(const nlohmann::json& manifest);

/// "a:b:n" -> n evenly spaced values (n = 1 gives a). Throws ParseError.
std::vector<double> parse_range(const std::string& text);

/// Subcommands. Each writes into opt.out_dir and returns the exit code;
/// library errors propagate as exceptions carrying their own exit code.
int run_spectrum(const RunOptions& opt, std::ostream& log);
int run_solve(const RunOptions& opt, std::ostream& log);
int run_thresholds(const RunOptions& opt, std::ostream& log);
int run_verify(const RunOptions& opt, std::ostream& log);
int run_graph_check(const RunOptions& opt, std::ostream& log);
int run_sweep(const RunOptions& opt, std::ostream& log);

/// Worker count: MAGNOGRAPH_THREADS when set and positive, otherwise the
/// hardware concurrency, never more than `jobs`.
int worker_count(std::size_t jobs);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace magnograph
