#pragma once

#include <complex>
#include <string>

#include <Eigen/Core>

#include "magnograph/graph.hpp"
#include "magnograph/grid.hpp"
#include "magnograph/potential.hpp"

namespace magnograph {

/// Complex nodal values, one per global dof. Continuity at vertices holds by
/// construction; pinned truncation nodes are implicitly zero.
using GraphFunction = Eigen::VectorXcd;

/// Value of `u` at a node of an edge (zero at a pinned node).
inline std::complex<double> node_value(const GraphFunction& u, const EdgeGrid& e, int node) {
  int d = e.dof[static_cast<std::size_t>(node)];
  return d == kPinned ? std::complex<double>(0.0) : u[d];
}

/// Offset of each edge's first element in the concatenated element array.
std::vector<int> element_offsets(const GraphGrid& grid);

/// Discrete D_A = (1/i) d/dx - A, one value per element:
///   (e^{-i theta/2} u_{j+1} - e^{i theta/2} u_j) / (i h),
/// theta being the element integral of A. For A = 0 this is the plain
/// difference quotient divided by i; it is linear in u and transforms
/// covariantly under u -> e^{i chi} u, A -> A + chi'.
Eigen::VectorXcd covariant_derivative(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid);

/// |u| per dof.
GraphFunction modulus(const GraphFunction& u);

/// Trapezoidal integral of |u|^2.
double mass(const GraphFunction& u, const GraphGrid& grid);

/// Trapezoidal integral of u * conj(w); its real part is the real L2 product.
std::complex<double> inner_l2(const GraphFunction& u, const GraphFunction& w, const GraphGrid& grid);

/// Squared magnetic Sobolev norm: sum |D_A u|^2 h + sum w V |u|^2.
double norm_HA_squared(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid);
double norm_HA(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid);

/// L2 norm of D_A u alone (midpoint rule over elements).
double covariant_l2(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid);

/// Trapezoidal L^p norm; p >= 1.
double lp_norm(const GraphFunction& u, double p, const GraphGrid& grid);
double lp_norm(const GraphFunction& u, double p, const Eigen::VectorXd& weights);
double sup_norm(const GraphFunction& u);

/// Same objects after flipping the orientation of bounded edge `edge_id`:
/// node order reversed and A negated. Dof numbering is unchanged, so u is too.
struct Reoriented {
  MetricGraph graph;
  GraphGrid grid;
  PotentialPair pots;
  GraphFunction u;
};
Reoriented reorient_edge(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                         const GraphFunction& u, const std::string& edge_id);

/// Samples f(edge index, x) on every dof (pinned nodes skipped). Vertex dofs
/// take the value from the first incident edge in grid order.
template <class F>
GraphFunction sample_function(const GraphGrid& grid, const F& f) {
  GraphFunction u = GraphFunction::Zero(grid.dof_count);
  std::vector<bool> set(static_cast<std::size_t>(grid.dof_count), false);
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    for (int j = 0; j < e.nodes(); ++j) {
      int d = e.dof[static_cast<std::size_t>(j)];
      if (d == kPinned || set[static_cast<std::size_t>(d)]) continue;
      u[d] = f(k, e.x(j));
      set[static_cast<std::size_t>(d)] = true;
    }
  }
  return u;
}

}  // namespace magnograph
