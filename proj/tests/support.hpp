#pragma once

// Small builders shared by the unit tests.

#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <string>

#include "magnograph/app.hpp"
#include "magnograph/csv.hpp"
#include "magnograph/field.hpp"
#include "magnograph/graph.hpp"
#include "magnograph/potential.hpp"

namespace testing_support {

using namespace magnograph;
using cd = std::complex<double>;

inline const double kPi = std::acos(-1.0);

inline std::unique_ptr<Workspace> workspace(const std::string& graph, const std::string& A = "0",
                                            const std::string& V = "1", double h = 1e-2, double L = 20.0,
                                            double flux = 0.0) {
  return make_workspace(parse_graph(graph), parse_potentials(A, V), h, L, flux);
}

inline std::string interval(double len) { return "v0 -- v1 : " + fmt17(len) + "\n"; }

inline Eigen::VectorXcd random_complex(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cd(nd(rng), nd(rng));
  return v;
}

inline const std::string kInterval = "v0 -- v1 : 3.141592653589793\n";
inline const std::string kLoop = "v0 -- v0 : 6.283185307179586\n";
inline const std::string kTadpole = "v0 -- v0 : 6.283185307179586\nv0 -- v1 : 1\n";
inline const std::string kStar = "v0 -- v1 : 1\nv0 --> inf\nv0 --> inf\n";

}  // namespace testing_support
