#include "magnograph/field.hpp"

#include <algorithm>
#include <cmath>

#include "magnograph/error.hpp"

namespace magnograph {

using cd = std::complex<double>;

std::vector<int> element_offsets(const GraphGrid& grid) {
  std::vector<int> off(grid.edges.size() + 1, 0);
  for (std::size_t k = 0; k < grid.edges.size(); ++k) off[k + 1] = off[k] + grid.edges[k].elements();
  return off;
}

Eigen::VectorXcd covariant_derivative(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid) {
  const auto off = element_offsets(grid);
  Eigen::VectorXcd d(off.back());
  const cd i(0.0, 1.0);
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    for (int j = 0; j < e.elements(); ++j) {
      const double half = 0.5 * pots.edges[k].phase[j];
      const cd rot(std::cos(half), std::sin(half));
      d[off[k] + j] = (std::conj(rot) * node_value(u, e, j + 1) - rot * node_value(u, e, j)) / (i * e.h);
    }
  }
  return d;
}

GraphFunction modulus(const GraphFunction& u) { return u.cwiseAbs().cast<cd>(); }

double mass(const GraphFunction& u, const GraphGrid& grid) {
  return grid.weights.dot(u.cwiseAbs2());
}

std::complex<double> inner_l2(const GraphFunction& u, const GraphFunction& w, const GraphGrid& grid) {
  cd s = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) s += grid.weights[j] * u[j] * std::conj(w[j]);
  return s;
}

double covariant_l2(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid) {
  const Eigen::VectorXcd d = covariant_derivative(u, pots, grid);
  const auto off = element_offsets(grid);
  double s = 0.0;
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    s += grid.edges[k].h * d.segment(off[k], grid.edges[k].elements()).squaredNorm();
  }
  return std::sqrt(s);
}

double norm_HA_squared(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid) {
  const double kinetic = std::pow(covariant_l2(u, pots, grid), 2);
  return kinetic + grid.weights.cwiseProduct(pots.V).dot(u.cwiseAbs2());
}

double norm_HA(const GraphFunction& u, const PotentialPair& pots, const GraphGrid& grid) {
  return std::sqrt(norm_HA_squared(u, pots, grid));
}

double lp_norm(const GraphFunction& u, double p, const Eigen::VectorXd& weights) {
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  double s = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) s += weights[j] * std::pow(std::abs(u[j]), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const GraphFunction& u, double p, const GraphGrid& grid) { return lp_norm(u, p, grid.weights); }

double sup_norm(const GraphFunction& u) { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }

Reoriented reorient_edge(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                         const GraphFunction& u, const std::string& edge_id) {
  const Edge& target = g.edge(edge_id);
  if (target.is_half_line()) throw ValidationError("cannot reorient half-line '" + edge_id + "'");

  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) {
    if (e.id == edge_id) std::swap(e.tail, *e.head);
  }
  Reoriented out{MetricGraph::create(g.vertices(), edges, g.nonlinearity_region()), grid, pots, u};

  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    if (grid.edges[k].id != edge_id) continue;
    auto& eg = out.grid.edges[k];
    std::reverse(eg.dof.begin(), eg.dof.end());
    auto& ep = out.pots.edges[k];
    ep.phase = -ep.phase.reverse().eval();
    ep.A_node = -ep.A_node.reverse().eval();
    ep.V_node = ep.V_node.reverse().eval();
  }
  return out;
}

}  // namespace magnograph
