#pragma once

// Helpers shared by the subcommand implementations; not part of the public API.

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <string>
#include <vector>

#include "json.hpp"
#include "magnograph/app.hpp"
#include "magnograph/audit.hpp"
#include "magnograph/solver.hpp"
#include "magnograph/thresholds.hpp"

namespace magnograph::detail {

std::string path_in(const RunOptions& opt, const std::string& name);
std::string persist_manifest(const RunOptions& opt, nlohmann::json manifest);
SolverConfig solver_config(const RunOptions& opt);
void check_p(double p);
void check_mu(double mu);
Spectrum spectrum_with_levels(const HermitianSystem& sys, int levels, int at_least);
Thresholds thresholds_for(const Workspace& ws, const Spectrum& spec, double p, int levels, int probes,
                          std::uint64_t gns_seed);
std::vector<double> eigenvalues(const Spectrum& s);
std::vector<std::string> split_csv(const std::string& line);

/// Runs body(i) for i in [0, n) on worker_count(n) threads; the first
/// exception (by worker) is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, const F& body) {
  const int workers = worker_count(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next++) < n;) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace magnograph::detail
