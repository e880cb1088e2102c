#include "magnograph/grid.hpp"

#include <algorithm>
#include <cmath>

#include "magnograph/error.hpp"
#include "magnograph/hash.hpp"

namespace magnograph {

const EdgeGrid& GraphGrid::edge(const std::string& id) const {
  for (const auto& e : edges) {
    if (e.id == id) return e;
  }
  throw ValidationError("grid has no edge '" + id + "'");
}

double default_truncation_length(const MetricGraph& g) {
  double longest = 0.0;
  for (const Edge& e : g.edges()) {
    if (!e.is_half_line()) longest = std::max(longest, e.length);
  }
  return longest > 0.0 ? 12.0 * longest : 50.0;
}

GraphGrid build_grid(const MetricGraph& g, double target_h, double truncation_length) {
  if (!(target_h > 0.0)) throw ValidationError("grid spacing must be positive");
  if (!is_compact(g) && !(truncation_length > 0.0)) {
    throw ValidationError("half-line truncation length must be positive");
  }

  GraphGrid grid;
  grid.target_h = target_h;
  grid.truncation_length = truncation_length;
  const auto& vertices = g.vertices();
  grid.vertex_dof.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) grid.vertex_dof[i] = static_cast<int>(i);
  int next = static_cast<int>(vertices.size());

  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const Edge& e = g.edges()[k];
    EdgeGrid eg;
    eg.id = e.id;
    eg.edge_index = k;
    eg.half_line = e.is_half_line();
    eg.length = eg.half_line ? truncation_length : e.length;
    // Small relative slack so that l/h landing on an integer does not add a node.
    const long elements = std::max(1L, static_cast<long>(std::ceil(eg.length / target_h * (1.0 - 1e-12))));
    eg.h = eg.length / static_cast<double>(elements);
    eg.dof.assign(static_cast<std::size_t>(elements + 1), kPinned);
    eg.dof.front() = grid.vertex_dof[*g.vertex_index(e.tail)];
    for (long j = 1; j < elements; ++j) eg.dof[static_cast<std::size_t>(j)] = next++;
    if (!eg.half_line) eg.dof.back() = grid.vertex_dof[*g.vertex_index(*e.head)];
    grid.edges.push_back(std::move(eg));
  }
  grid.dof_count = next;

  std::vector<bool> all(grid.edges.size(), true);
  grid.weights = region_weights(grid, all);
  return grid;
}

Eigen::VectorXd region_weights(const GraphGrid& grid, const std::vector<bool>& edge_in_region) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.dof_count);
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    if (!edge_in_region[k]) continue;
    const EdgeGrid& e = grid.edges[k];
    for (int j = 0; j < e.elements(); ++j) {
      for (int node : {j, j + 1}) {
        int d = e.dof[static_cast<std::size_t>(node)];
        if (d != kPinned) w[d] += 0.5 * e.h;
      }
    }
  }
  return w;
}

std::vector<bool> edge_mask(const GraphGrid& grid, const std::set<std::string>& ids) {
  std::vector<bool> mask(grid.edges.size());
  for (std::size_t k = 0; k < grid.edges.size(); ++k) mask[k] = ids.count(grid.edges[k].id) > 0;
  return mask;
}

std::vector<bool> nonlinearity_mask(const MetricGraph& g, const GraphGrid& grid) {
  return edge_mask(grid, g.region_edges());
}

std::uint64_t grid_hash(const GraphGrid& grid) {
  Fnv1a h;
  for (const auto& e : grid.edges) {
    h.add(e.id);
    h.add(e.length);
    h.add(static_cast<std::int64_t>(e.nodes()));
    h.add(static_cast<std::int64_t>(e.half_line));
    for (int d : e.dof) h.add(static_cast<std::int64_t>(d));
  }
  return h.value();
}

}  // namespace magnograph
