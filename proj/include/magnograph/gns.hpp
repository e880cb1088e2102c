#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>

#include "magnograph/field.hpp"
#include "magnograph/hermitian.hpp"

namespace magnograph {

/// Everything the Gagliardo-Nirenberg ratios need. On compact graphs the
/// gradient term is the full norm ||u||; otherwise it is ||D_A u||_2.
class GnsContext {
 public:
  GnsContext(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots, const HermitianSystem& sys);

  /// ||u||^2 or ||D_A u||_2^2, depending on compactness.
  double gradient_term(const Eigen::VectorXcd& u) const;
  /// ||u||_p^p / (G^{p/2-1} ||u||_2^{p/2+1}) with G = sqrt(gradient_term).
  double ratio_p(const Eigen::VectorXcd& u, double p) const;
  /// ||u||_inf / (G^{1/2} ||u||_2^{1/2}).
  double ratio_inf(const Eigen::VectorXcd& u) const;

  bool compact() const { return compact_; }
  const GraphGrid& grid() const { return grid_; }
  const HermitianSystem& system() const { return sys_; }

 private:
  const MetricGraph& g_;
  const GraphGrid& grid_;
  const HermitianSystem& sys_;
  Eigen::VectorXd wV_;  // lumped V weights removed from S on noncompact graphs
  bool compact_;

  friend class ProbeGenerator;
};

/// Deterministic test-field families: smooth random fields, localized bumps
/// around vertices and edge points, and random combinations of a given basis.
class ProbeGenerator {
 public:
  ProbeGenerator(const MetricGraph& g, const GraphGrid& grid, std::uint64_t seed);

  Eigen::VectorXcd smooth();
  Eigen::VectorXcd bump();
  /// Random complex combination of up to three columns of `basis`.
  Eigen::VectorXcd combination(const Eigen::MatrixXcd& basis);
  /// Cycles through smooth / bump / smooth with a random global phase.
  Eigen::VectorXcd next();

 private:
  Eigen::VectorXcd from_distances(const std::vector<double>& vertex_dist, std::size_t edge, double x0,
                                  double width);
  std::vector<double> vertex_distances(std::size_t source_vertex) const;

  const MetricGraph& g_;
  const GraphGrid& grid_;
  std::mt19937_64 rng_;
  std::uint64_t counter_ = 0;
};

struct GnsConstants {
  double p = 0.0;
  double C_p = 0.0;
  double C_inf = 0.0;
  double raw_C_p = 0.0;    // best ratio before the safety factor
  double raw_C_inf = 0.0;
  int probes = 0;
  bool compact = true;
  std::string provenance;
};

inline constexpr double kGnsSafety = 1.05;

/// Empirical constants: max of the defining ratios over `probes` fields, the
/// best few refined by preconditioned ascent, times kGnsSafety. These are
/// lower bounds of the best constants inflated by 5%, not certified values.
/// Throws ValidationError when probes < 100 or p < 2.
GnsConstants estimate_gns_constants(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                                    const HermitianSystem& sys, double p, int probes = 1000,
                                    std::uint64_t seed = 20240611);

/// Equivalent norm under V -> V + V_q + nu. For q in [1, inf) the threshold
/// is nu_min = 1 + C_half ||V_q||_q^{2q/(2q-1)} with the explicit Young
/// constant C_half = q^{-1/(2q-1)} (2q-1)/(2q) K^{2q/(2q-1)}, where
/// K = C_{p'}^{(q-1)/q}, p' = 2q/(q-1) (K = C_inf^2 when q = 1). For q = inf
/// the threshold is ||V_q||_inf.
struct PerturbedNormBound {
  double q = 1.0;
  double Vq_norm = 0.0;
  double C_half = 0.0;
  double nu_min = 0.0;
  bool bounded_case = false;  // q = inf
};

/// `C_pprime` is C_{p'} for q > 1 and C_inf for q = 1; ignored for q = inf.
PerturbedNormBound perturbed_norm_bound(double q, double Vq_norm, double C_pprime);

/// L^q norm of nodal samples (q = inf gives the max).
double potential_lq_norm(const Eigen::VectorXd& Vq, double q, const GraphGrid& grid);

/// Q_nu(u) = sum h|D_A u|^2 + sum w (V + V_q + nu)|u|^2.
double perturbed_quadratic(const HermitianSystem& sys, const Eigen::VectorXcd& u, const Eigen::VectorXd& Vq, double nu);

}  // namespace magnograph
