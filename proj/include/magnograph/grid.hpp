#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "magnograph/graph.hpp"

namespace magnograph {

inline constexpr int kPinned = -1;

/// Uniform node layout on one edge. Node 0 sits at the tail vertex. For a
/// half-line the last node is the truncation point, pinned to zero.
struct EdgeGrid {
  std::string id;
  std::size_t edge_index = 0;
  bool half_line = false;
  double length = 0.0;  // truncated length for half-lines
  double h = 0.0;
  std::vector<int> dof;  // global dof per node, kPinned for the truncation node

  int nodes() const { return static_cast<int>(dof.size()); }
  int elements() const { return nodes() - 1; }
  double x(int node) const { return node * h; }
};

/// Shared-DOF grid over a metric graph. Every vertex owns one global dof;
/// interior nodes belong to exactly one edge.
struct GraphGrid {
  std::vector<EdgeGrid> edges;
  std::vector<int> vertex_dof;  // indexed like MetricGraph::vertices()
  int dof_count = 0;
  Eigen::VectorXd weights;  // lumped (trapezoidal) node weights per dof
  double target_h = 0.0;
  double truncation_length = 0.0;

  const EdgeGrid& edge(const std::string& id) const;
};

/// Node counts satisfy h_e <= target_h; half-lines are cut at
/// `truncation_length` with a pinned far node.
GraphGrid build_grid(const MetricGraph& g, double target_h, double truncation_length);

/// Default truncation length: 12 times the longest bounded edge, 50 when the
/// core is empty.
double default_truncation_length(const MetricGraph& g);

/// Trapezoidal weights restricted to the elements of the given edges.
Eigen::VectorXd region_weights(const GraphGrid& grid, const std::vector<bool>& edge_in_region);

/// Mask over grid.edges for the graph's nonlinearity region.
std::vector<bool> nonlinearity_mask(const MetricGraph& g, const GraphGrid& grid);

/// Mask over grid.edges for an explicit edge-id set.
std::vector<bool> edge_mask(const GraphGrid& grid, const std::set<std::string>& ids);

/// Stable hash of the grid layout (ids, lengths, node counts).
std::uint64_t grid_hash(const GraphGrid& grid);

}  // namespace magnograph
