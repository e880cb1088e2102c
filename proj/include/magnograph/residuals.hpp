#pragma once

#include <vector>

#include "magnograph/field.hpp"

namespace magnograph {

/// Pointwise residuals of the Euler-Lagrange equation, scaled by sup|u|.
///
/// Interior: u'' + lambda u + chi |u|^{p-2} u - 2i A u' - i A' u - (A^2 + V) u
/// by central differences on interior nodes of each edge.
/// Vertex: sum over incident edges of (1/i) d_out u - A_out u, with one-sided
/// second-order differences; d_out and A_out carry the sign of the outward
/// direction (A at the start of an edge, -A at its end).
struct StrongResidual {
  std::vector<double> edge_interior;  // max per grid edge
  std::vector<double> vertex;         // per graph vertex
  double interior_max = 0.0;
  double vertex_max = 0.0;
};

StrongResidual strong_residual(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                               const GraphFunction& u, double lambda, double p,
                               const std::vector<bool>& nonlinearity_mask);

}  // namespace magnograph
