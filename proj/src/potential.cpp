#include "magnograph/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "magnograph/error.hpp"
#include "magnograph/snapshot.hpp"

namespace magnograph {

double SampledProfile::operator()(double at) const {
  if (x.empty()) return 0.0;
  if (at <= x.front()) return value.front();
  if (at >= x.back()) return value.back();
  auto it = std::upper_bound(x.begin(), x.end(), at);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - t) * value[i - 1] + t * value[i];
}

double ScalarProfile::operator()(double x) const {
  return std::visit([x](const auto& f) { return f(x); }, impl_);
}

std::string ScalarProfile::descriptor() const {
  if (const auto* e = std::get_if<Expression>(&impl_)) return e->source();
  const auto& s = std::get<SampledProfile>(impl_);
  std::ostringstream os;
  os.precision(17);
  os << "sampled[";
  for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << s.x[i] << ':' << s.value[i];
  os << ']';
  return os.str();
}

const ScalarProfile& PotentialSpec::A(const std::string& edge) const {
  auto it = A_edges.find(edge);
  return it == A_edges.end() ? A_default : it->second;
}

const ScalarProfile& PotentialSpec::V(const std::string& edge) const {
  auto it = V_edges.find(edge);
  return it == V_edges.end() ? V_default : it->second;
}

std::string PotentialSpec::descriptor() const {
  std::ostringstream os;
  os << "A=" << A_default.descriptor();
  for (const auto& [id, f] : A_edges) os << ";A[" << id << "]=" << f.descriptor();
  os << ";V=" << V_default.descriptor();
  for (const auto& [id, f] : V_edges) os << ";V[" << id << "]=" << f.descriptor();
  return os.str();
}

void parse_potential_argument(std::string_view text, ScalarProfile& fallback,
                              std::map<std::string, ScalarProfile>& per_edge) {
  if (!text.empty() && text.front() == '@') {
    std::string path(text.substr(1));
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open potential file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    for (auto& [edge, profile] : read_potential_file(buf.str())) per_edge[edge] = ScalarProfile(std::move(profile));
    return;
  }
  if (text.find('=') == std::string_view::npos) {
    fallback = Expression::parse(text);
    return;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("potential entry '" + std::string(item) + "' lacks '='");
    std::string key(item.substr(0, eq));
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    Expression e = Expression::parse(item.substr(eq + 1));
    if (key == "*") fallback = e;
    else per_edge[key] = e;
  }
}

namespace {

// 3-point Gauss-Legendre on [a, b].
template <class F>
double gauss3(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  const double s = std::sqrt(0.6);
  return r * (5.0 / 9.0 * f(c - r * s) + 8.0 / 9.0 * f(c) + 5.0 / 9.0 * f(c + r * s));
}

}  // namespace

PotentialPair sample_potentials(const GraphGrid& grid, const PotentialSpec& spec) {
  PotentialPair pots;
  pots.edges.resize(grid.edges.size());
  Eigen::VectorXd vsum = Eigen::VectorXd::Zero(grid.dof_count);
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    const ScalarProfile& A = spec.A(e.id);
    const ScalarProfile& V = spec.V(e.id);
    EdgePotential& ep = pots.edges[k];
    ep.phase.resize(e.elements());
    ep.A_node.resize(e.nodes());
    ep.V_node.resize(e.nodes());
    for (int j = 0; j < e.nodes(); ++j) {
      ep.A_node[j] = A(e.x(j));
      ep.V_node[j] = V(e.x(j));
      if (!(ep.V_node[j] >= 1.0)) {
        throw PotentialDomainError("V = " + std::to_string(ep.V_node[j]) + " < 1 on edge '" + e.id +
                                   "' at x = " + std::to_string(e.x(j)));
      }
    }
    for (int j = 0; j < e.elements(); ++j) {
      ep.phase[j] = gauss3(A, e.x(j), e.x(j + 1));
      for (int node : {j, j + 1}) {
        int d = e.dof[static_cast<std::size_t>(node)];
        if (d != kPinned) vsum[d] += 0.5 * e.h * ep.V_node[node];
      }
    }
  }
  pots.V = vsum.cwiseQuotient(grid.weights);
  return pots;
}

PotentialPair add_gauge(const GraphGrid& grid, const PotentialPair& pots, const Eigen::VectorXd& chi_dof) {
  PotentialPair out = pots;
  for (std::size_t k = 0; k < grid.edges.size(); ++k) {
    const EdgeGrid& e = grid.edges[k];
    auto chi = [&](int node) {
      int d = e.dof[static_cast<std::size_t>(node)];
      return d == kPinned ? 0.0 : chi_dof[d];
    };
    for (int j = 0; j < e.elements(); ++j) out.edges[k].phase[j] += chi(j + 1) - chi(j);
    for (int j = 0; j < e.nodes(); ++j) {
      // nodal A only feeds residual diagnostics; use the one-sided difference of chi
      int a = std::max(0, j - 1), b = std::min(e.nodes() - 1, j + 1);
      out.edges[k].A_node[j] += (chi(b) - chi(a)) / ((b - a) * e.h);
    }
  }
  return out;
}

PotentialPair without_magnetic(const PotentialPair& pots) {
  PotentialPair out = pots;
  for (auto& e : out.edges) {
    e.phase.setZero();
    e.A_node.setZero();
  }
  return out;
}

EssentialSpectrumSurrogate essential_spectrum_surrogate(const MetricGraph& g, const GraphGrid& grid,
                                                        const PotentialSpec& spec) {
  if (is_compact(g)) return {std::numeric_limits<double>::infinity(), false};
  const double L = grid.truncation_length > 0.0 ? grid.truncation_length : default_truncation_length(g);
  double best = std::numeric_limits<double>::infinity();
  for (const Edge& e : g.edges()) {
    if (!e.is_half_line()) continue;
    const ScalarProfile& V = spec.V(e.id);
    double v1 = V(L), v2 = V(2 * L), v4 = V(4 * L);
    bool divergent = !V.is_sampled() && v2 >= 1.5 * v1 && v4 >= 1.5 * v2;
    if (!divergent) best = std::min(best, v4);
  }
  return {best, true};
}

}  // namespace magnograph
