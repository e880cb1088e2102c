// Command-line front end: parses flags and hands off to the library runners.

#include <iostream>

#include "CLI11.hpp"
#include "magnograph/app.hpp"
#include "magnograph/error.hpp"

namespace mg = magnograph;

namespace {

void add_graph_flags(CLI::App* cmd, mg::RunOptions& o) {
  cmd->add_option("--graph", o.graph_path, "graph description file")->required();
  cmd->add_option("--A", o.A, "magnetic potential: expression, e0=expr;*=expr, or @file");
  cmd->add_option("--V", o.V, "electric potential (must stay >= 1), same forms as --A");
  cmd->add_option("--h", o.h, "target mesh width");
  cmd->add_option("--L-trunc", o.L_trunc, "half-line truncation length");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
}

void add_model_flags(CLI::App* cmd, mg::RunOptions& o) {
  cmd->add_option("--p", o.p, "nonlinearity exponent, p > 2");
  cmd->add_option("--mu", o.mu, "prescribed mass");
  cmd->add_option("--probes", o.probes, "probe count for the empirical GNS constants");
  cmd->add_option("--gns-seed", o.gns_seed, "seed of the GNS probe generator");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magnetic NLS on metric graphs: spectra, normalized solutions, thresholds and audits"};
  // --h is the mesh width, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  mg::RunOptions o;

  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenpairs of the magnetic operator");
  add_graph_flags(spectrum, o);
  spectrum->add_option("--k", o.k, "number of eigenpairs");
  spectrum->add_option("--flux-sweep", o.flux_sweep, "start:stop:count of extra total flux over bounded edges");
  spectrum->add_flag("--eigenvectors", o.eigenvectors, "write eigenvector snapshots");

  auto* solve = app.add_subcommand("solve", "normalized critical points by penalized continuation");
  add_graph_flags(solve, o);
  add_model_flags(solve, o);
  solve->add_option("--branches", o.branches, "number of branches seeded from eigenfunctions");
  solve->add_option("--r-schedule", o.r_schedule, "penalty exponents, comma separated")->delimiter(',');
  solve->add_option("--seed", o.seed, "solver seed");

  auto* thresholds = app.add_subcommand("thresholds", "mass thresholds from spectrum and GNS constants");
  add_graph_flags(thresholds, o);
  add_model_flags(thresholds, o);
  thresholds->add_option("--k", o.k, "number of spectral levels");
  thresholds->add_option("--c", o.c_values, "c values for mu_{c,p}")->delimiter(',');
  thresholds->add_option("--lambda", o.lambda_values, "negative lambda values for mu*_{lambda,p}")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "re-run the audits on a solve bundle");
  add_graph_flags(verify, o);
  add_model_flags(verify, o);
  verify->add_option("--bundle", o.bundle_dir, "output directory of a previous solve")->required();

  auto* sweep = app.add_subcommand("sweep", "grid of solves over mu, p and flux");
  sweep->add_option("--config", o.config_path, "JSON sweep description")->required();
  sweep->add_option("--out-dir", o.out_dir, "output directory");

  auto* graph = app.add_subcommand("graph", "graph utilities");
  graph->require_subcommand(1);
  auto* check = graph->add_subcommand("check", "parse and validate a graph file");
  check->add_option("--graph", o.graph_path, "graph description file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (spectrum->parsed()) {
      o.command = "spectrum";
      return mg::run_spectrum(o, std::cout);
    }
    if (solve->parsed()) {
      o.command = "solve";
      return mg::run_solve(o, std::cout);
    }
    if (thresholds->parsed()) {
      o.command = "thresholds";
      return mg::run_thresholds(o, std::cout);
    }
    if (verify->parsed()) {
      o.command = "verify";
      return mg::run_verify(o, std::cout);
    }
    if (sweep->parsed()) {
      o.command = "sweep";
      return mg::run_sweep(o, std::cout);
    }
    if (check->parsed()) {
      o.command = "graph check";
      return mg::run_graph_check(o, std::cout);
    }
  } catch (const mg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
