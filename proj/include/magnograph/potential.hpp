#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "magnograph/expression.hpp"
#include "magnograph/graph.hpp"
#include "magnograph/grid.hpp"

namespace magnograph {

/// Tabulated profile along an edge, linearly interpolated and held constant
/// outside the sampled range.
struct SampledProfile {
  std::vector<double> x;
  std::vector<double> value;

  double operator()(double at) const;
};

/// A scalar function of the edge coordinate: closed form or tabulated.
class ScalarProfile {
 public:
  ScalarProfile() : ScalarProfile(Expression::constant(0.0)) {}
  ScalarProfile(Expression e) : impl_(std::move(e)) {}
  ScalarProfile(SampledProfile s) : impl_(std::move(s)) {}

  double operator()(double x) const;
  bool is_sampled() const { return std::holds_alternative<SampledProfile>(impl_); }
  std::string descriptor() const;

 private:
  std::variant<Expression, SampledProfile> impl_;
};

/// Magnetic potential A and electric potential V, per edge with a default.
/// A is expressed in each edge's own coordinate (tail at 0).
struct PotentialSpec {
  ScalarProfile A_default = Expression::constant(0.0);
  ScalarProfile V_default = Expression::constant(1.0);
  std::map<std::string, ScalarProfile> A_edges;
  std::map<std::string, ScalarProfile> V_edges;

  const ScalarProfile& A(const std::string& edge) const;
  const ScalarProfile& V(const std::string& edge) const;
  std::string descriptor() const;
};

/// Fills one component of a spec from a CLI-style string: a plain expression
/// for every edge, `e0=expr;e1=expr;*=expr` per edge, or `@path` to a
/// potential file. Throws ParseError.
void parse_potential_argument(std::string_view text, ScalarProfile& fallback,
                              std::map<std::string, ScalarProfile>& per_edge);

/// Potentials sampled onto a grid.
///
/// `phase[j]` is the integral of A over element j (3-point Gauss); it is the
/// only place A enters the discrete form, which keeps gauge transformations
/// exact on the grid. `A_node` and `V_node` are edge-side nodal samples used by
/// the strong-form residual; `V` is the weight-averaged value per global dof.
struct EdgePotential {
  Eigen::VectorXd phase;
  Eigen::VectorXd A_node;
  Eigen::VectorXd V_node;
};

struct PotentialPair {
  std::vector<EdgePotential> edges;  // parallel to GraphGrid::edges
  Eigen::VectorXd V;

  double element_A(std::size_t edge, int element, double h) const { return edges[edge].phase[element] / h; }
};

/// Throws PotentialDomainError when V < 1 anywhere on the grid.
PotentialPair sample_potentials(const GraphGrid& grid, const PotentialSpec& spec);

/// Pure-gauge update: A -> A + chi' for chi given by its nodal values per edge
/// (continuous at vertices when the caller builds it from dof values).
PotentialPair add_gauge(const GraphGrid& grid, const PotentialPair& pots, const Eigen::VectorXd& chi_dof);

/// Same potentials with A set to zero.
PotentialPair without_magnetic(const PotentialPair& pots);

/// Surrogate for the bottom of the essential spectrum: +inf on compact graphs,
/// otherwise the smallest tail limit of V over half-lines. A closed-form tail
/// that grows by 50% from L to 2L and from 2L to 4L is classified as divergent.
struct EssentialSpectrumSurrogate {
  double value;
  bool caveat;  // always true on noncompact graphs: the value is an estimate
};
EssentialSpectrumSurrogate essential_spectrum_surrogate(const MetricGraph& g, const GraphGrid& grid,
                                                        const PotentialSpec& spec);

}  // namespace magnograph
