#include "magnograph/graph.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "magnograph/error.hpp"

namespace magnograph {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_decimal(const std::string& tok, std::size_t line_no) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) + ": expected a number, got '" + tok + "'");
  }
  return value;
}

bool valid_token(const std::string& tok) {
  if (tok.empty()) return false;
  for (char c : tok) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  }
  return tok != "--" && tok != "-->";
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

MetricGraph MetricGraph::create(std::vector<Vertex> vertices, std::vector<Edge> edges,
                                NonlinearityRegion region) {
  MetricGraph g;
  g.vertices_ = std::move(vertices);
  g.edges_ = std::move(edges);
  g.region_ = std::move(region);

  if (g.edges_.empty()) throw ValidationError("graph has no edges");

  std::map<std::string, std::size_t> vindex;
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
    if (!vindex.emplace(g.vertices_[i].id, i).second) {
      throw ValidationError("duplicate vertex id '" + g.vertices_[i].id + "'");
    }
  }

  std::set<std::string> edge_ids;
  std::vector<std::size_t> parent(g.vertices_.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> degree(g.vertices_.size(), 0);

  for (const Edge& e : g.edges_) {
    if (!edge_ids.insert(e.id).second) throw ValidationError("duplicate edge id '" + e.id + "'");
    auto t = vindex.find(e.tail);
    if (t == vindex.end()) throw ValidationError("edge '" + e.id + "' references unknown vertex '" + e.tail + "'");
    ++degree[t->second];
    if (e.kind == EdgeKind::HalfLine) {
      if (e.head) throw ValidationError("half-line '" + e.id + "' must not have a head vertex");
      continue;
    }
    if (!e.head) throw ValidationError("bounded edge '" + e.id + "' has no head vertex");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw ValidationError("edge '" + e.id + "' must have a finite positive length");
    }
    auto h = vindex.find(*e.head);
    if (h == vindex.end()) throw ValidationError("edge '" + e.id + "' references unknown vertex '" + *e.head + "'");
    ++degree[h->second];
    parent[find(t->second)] = find(h->second);
  }

  for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
    if (degree[i] == 0) throw ValidationError("vertex '" + g.vertices_[i].id + "' has no incident edge");
  }
  for (std::size_t i = 1; i < g.vertices_.size(); ++i) {
    if (find(i) != find(0)) throw ValidationError("graph is disconnected");
  }

  if (g.region_.kind == RegionKind::Subgraph) {
    if (g.region_.edges.empty()) throw ValidationError("empty nonlinearity subgraph");
    for (const auto& id : g.region_.edges) {
      if (!edge_ids.count(id)) throw ValidationError("core subgraph references unknown edge '" + id + "'");
    }
  } else {
    g.region_.edges.clear();
  }
  return g;
}

std::optional<std::size_t> MetricGraph::vertex_index(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> MetricGraph::edge_index(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return i;
  }
  return std::nullopt;
}

const Edge& MetricGraph::edge(std::string_view id) const {
  auto i = edge_index(id);
  if (!i) throw ValidationError("unknown edge '" + std::string(id) + "'");
  return edges_[*i];
}

std::set<std::string> MetricGraph::compact_core() const {
  std::set<std::string> core;
  for (const Edge& e : edges_) {
    if (!e.is_half_line()) core.insert(e.id);
  }
  return core;
}

std::set<std::string> MetricGraph::region_edges() const {
  switch (region_.kind) {
    case RegionKind::CompactCore:
      return compact_core();
    case RegionKind::Subgraph:
      return region_.edges;
    case RegionKind::WholeGraph:
      break;
  }
  std::set<std::string> all;
  for (const Edge& e : edges_) all.insert(e.id);
  return all;
}

MetricGraph parse_graph(std::string_view text) {
  std::vector<Vertex> vertices;
  std::map<std::string, std::size_t> vindex;
  std::set<std::string> explicit_vertices;
  std::vector<Edge> edges;
  NonlinearityRegion region;
  bool saw_core = false;

  auto touch_vertex = [&](const std::string& id, std::size_t line_no) -> std::size_t {
    if (!valid_token(id)) throw ParseError("line " + std::to_string(line_no) + ": invalid vertex id '" + id + "'");
    auto it = vindex.find(id);
    if (it != vindex.end()) return it->second;
    vertices.push_back(Vertex{id, std::nullopt});
    vindex.emplace(id, vertices.size() - 1);
    return vertices.size() - 1;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tok[0] == "vertex") {
      if (tok.size() != 2 && tok.size() != 4) throw ParseError(where + "expected 'vertex <id> [x y]'");
      if (!explicit_vertices.insert(tok[1]).second) throw ValidationError(where + "vertex '" + tok[1] + "' declared twice");
      std::size_t i = touch_vertex(tok[1], line_no);
      if (tok.size() == 4) {
        vertices[i].position_hint = std::array<double, 2>{parse_decimal(tok[2], line_no), parse_decimal(tok[3], line_no)};
      }
    } else if (tok[0] == "core") {
      if (saw_core) throw ValidationError(where + "duplicate core statement");
      saw_core = true;
      if (tok.size() == 2 && tok[1] == "whole") {
        region.kind = RegionKind::WholeGraph;
      } else if (tok.size() == 2 && tok[1] == "compact") {
        region.kind = RegionKind::CompactCore;
      } else if (tok.size() >= 3 && tok[1] == "subgraph") {
        region.kind = RegionKind::Subgraph;
        for (std::size_t k = 2; k < tok.size(); ++k) region.edges.insert(tok[k]);
      } else {
        throw ParseError(where + "expected 'core whole', 'core compact' or 'core subgraph <edge_id> ...'");
      }
    } else if (tok.size() >= 3 && tok[1] == "-->") {
      if (tok[2] != "inf" || tok.size() > 4) throw ParseError(where + "expected '<id> --> inf [edge_id]'");
      Edge e;
      e.tail = tok[0];
      touch_vertex(e.tail, line_no);
      e.kind = EdgeKind::HalfLine;
      e.id = tok.size() == 4 ? tok[3] : "e" + std::to_string(edges.size());
      if (!valid_token(e.id)) throw ParseError(where + "invalid edge id '" + e.id + "'");
      edges.push_back(std::move(e));
    } else if (tok.size() >= 5 && tok[1] == "--" && tok[3] == ":") {
      if (tok.size() > 6) throw ParseError(where + "trailing tokens after edge");
      Edge e;
      e.tail = tok[0];
      e.head = tok[2];
      touch_vertex(e.tail, line_no);
      touch_vertex(*e.head, line_no);
      e.length = parse_decimal(tok[4], line_no);
      e.id = tok.size() == 6 ? tok[5] : "e" + std::to_string(edges.size());
      if (!valid_token(e.id)) throw ParseError(where + "invalid edge id '" + e.id + "'");
      edges.push_back(std::move(e));
    } else {
      throw ParseError(where + "unrecognised statement");
    }
  }
  if (!saw_core) {
    bool has_half_line = false;
    for (const Edge& e : edges) has_half_line = has_half_line || e.is_half_line();
    region.kind = has_half_line ? RegionKind::CompactCore : RegionKind::WholeGraph;
  }
  return MetricGraph::create(std::move(vertices), std::move(edges), std::move(region));
}

std::string serialize_graph(const MetricGraph& g) {
  std::ostringstream os;
  for (const Vertex& v : g.vertices()) {
    os << "vertex " << v.id;
    if (v.position_hint) os << ' ' << format_double((*v.position_hint)[0]) << ' ' << format_double((*v.position_hint)[1]);
    os << '\n';
  }
  for (const Edge& e : g.edges()) {
    if (e.is_half_line()) {
      os << e.tail << " --> inf " << e.id << '\n';
    } else {
      os << e.tail << " -- " << *e.head << " : " << format_double(e.length) << ' ' << e.id << '\n';
    }
  }
  const auto& region = g.nonlinearity_region();
  const RegionKind implied = is_compact(g) ? RegionKind::WholeGraph : RegionKind::CompactCore;
  if (region.kind == RegionKind::Subgraph) {
    os << "core subgraph";
    for (const auto& id : region.edges) os << ' ' << id;
    os << '\n';
  } else if (region.kind != implied) {
    os << (region.kind == RegionKind::WholeGraph ? "core whole\n" : "core compact\n");
  }
  return os.str();
}

bool is_compact(const MetricGraph& g) {
  for (const Edge& e : g.edges()) {
    if (e.is_half_line()) return false;
  }
  return true;
}

std::vector<Incidence> incident_edges(const MetricGraph& g, std::string_view v) {
  if (!g.vertex_index(v)) throw UnknownVertex("unknown vertex '" + std::string(v) + "'");
  std::vector<Incidence> out;
  for (const Edge& e : g.edges()) {
    if (e.tail == v) out.push_back({e.id, Endpoint::Start});
    if (e.head && *e.head == v) out.push_back({e.id, Endpoint::End});
  }
  return out;
}

std::size_t cycle_rank(const MetricGraph& g) {
  std::size_t bounded = g.compact_core().size();
  return bounded + 1 - g.vertices().size();
}

}  // namespace magnograph
