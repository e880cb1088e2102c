#include "magnograph/residuals.hpp"

#include <algorithm>
#include <cmath>

namespace magnograph {

using cd = std::complex<double>;

StrongResidual strong_residual(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                               const GraphFunction& u, double lambda, double p,
                               const std::vector<bool>& nonlinearity_mask) {
  const cd I(0.0, 1.0);
  const double scale = std::max(sup_norm(u), 1e-300);
  StrongResidual out;
  out.edge_interior.assign(grid.edges.size(), 0.0);
  std::vector<cd> vsum(g.vertices().size(), cd(0.0));

  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    const EdgePotential& ep = pots.edges[k];
    const double h = e.h;
    const int n = e.nodes();
    auto U = [&](int j) { return node_value(u, e, j); };
    const double chi = nonlinearity_mask[k] ? 1.0 : 0.0;

    double worst = 0.0;
    for (int j = 1; j + 1 < n; ++j) {
      const cd uj = U(j);
      const cd d2 = (U(j + 1) - 2.0 * uj + U(j - 1)) / (h * h);
      const cd d1 = (U(j + 1) - U(j - 1)) / (2.0 * h);
      const double A = ep.A_node[j];
      const double dA = (ep.A_node[j + 1] - ep.A_node[j - 1]) / (2.0 * h);
      const double V = ep.V_node[j];
      const cd r = d2 + lambda * uj + chi * std::pow(std::abs(uj), p - 2.0) * uj - 2.0 * I * A * d1 -
                   I * dA * uj - (A * A + V) * uj;
      worst = std::max(worst, std::abs(r));
    }
    out.edge_interior[k] = worst / scale;
    out.interior_max = std::max(out.interior_max, out.edge_interior[k]);

    const Edge& edge = g.edges()[e.edge_index];
    auto outward = [&](bool at_start) {
      cd du;
      if (n >= 3) {
        du = at_start ? (-3.0 * U(0) + 4.0 * U(1) - U(2)) / (2.0 * h)
                      : (3.0 * U(n - 1) - 4.0 * U(n - 2) + U(n - 3)) / (2.0 * h);
      } else {
        du = (U(n - 1) - U(0)) / h;
      }
      const cd uv = at_start ? U(0) : U(n - 1);
      const double A = at_start ? ep.A_node[0] : ep.A_node[n - 1];
      // outward derivative and potential flip sign at the end of the edge
      return at_start ? du / I - A * uv : -(du / I - A * uv);
    };
    vsum[*g.vertex_index(edge.tail)] += outward(true);
    if (edge.head) vsum[*g.vertex_index(*edge.head)] += outward(false);
  }

  out.vertex.resize(vsum.size());
  for (std::size_t v = 0; v < vsum.size(); ++v) {
    out.vertex[v] = std::abs(vsum[v]) / scale;
    out.vertex_max = std::max(out.vertex_max, out.vertex[v]);
  }
  return out;
}

}  // namespace magnograph
