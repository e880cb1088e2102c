#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace magnograph {

struct Vertex {
  std::string id;
  std::optional<std::array<double, 2>> position_hint;

  bool operator==(const Vertex&) const = default;
};

enum class EdgeKind { Bounded, HalfLine };

/// An edge is parametrised by [0, length] (or [0, inf) for half-lines) with
/// coordinate 0 at `tail`. Half-lines have no head vertex.
struct Edge {
  std::string id;
  std::string tail;
  std::optional<std::string> head;
  EdgeKind kind = EdgeKind::Bounded;
  double length = 0.0;  // meaningful for bounded edges only

  bool is_half_line() const { return kind == EdgeKind::HalfLine; }
  bool is_loop() const { return head && *head == tail; }
  bool operator==(const Edge&) const = default;
};

enum class RegionKind { WholeGraph, CompactCore, Subgraph };

/// Where the nonlinearity acts.
struct NonlinearityRegion {
  RegionKind kind = RegionKind::WholeGraph;
  std::set<std::string> edges;  // Subgraph only

  bool operator==(const NonlinearityRegion&) const = default;
};

enum class Endpoint { Start, End };

struct Incidence {
  std::string edge;
  Endpoint endpoint;

  bool operator==(const Incidence&) const = default;
};

/// Finite connected metric graph. Construct through `MetricGraph::create` (or
/// `parse_graph`), which validates; instances are immutable afterwards.
class MetricGraph {
 public:
  static MetricGraph create(std::vector<Vertex> vertices, std::vector<Edge> edges,
                            NonlinearityRegion region = {});

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const NonlinearityRegion& nonlinearity_region() const { return region_; }

  std::optional<std::size_t> vertex_index(std::string_view id) const;
  std::optional<std::size_t> edge_index(std::string_view id) const;
  const Edge& edge(std::string_view id) const;

  /// Ids of all bounded edges.
  std::set<std::string> compact_core() const;
  /// Ids of the edges carrying the nonlinearity.
  std::set<std::string> region_edges() const;

  bool operator==(const MetricGraph&) const = default;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  NonlinearityRegion region_;
};

/// Parses the line-oriented graph description format:
///
///     # comment
///     vertex <id> [x y]
///     <a> -- <b> : <length> [<edge_id>]
///     <a> --> inf [<edge_id>]
///     core subgraph <edge_id> ...     (or `core whole`, `core compact`)
///
/// Without a `core` line the nonlinearity acts on the whole graph when it is
/// compact and on the compact core otherwise. Unnamed edges get ids e0, e1, ... by position. Vertices are created on
/// first mention. Throws ParseError on syntax, ValidationError otherwise.
MetricGraph parse_graph(std::string_view text);

/// Inverse of `parse_graph` up to whitespace and comments.
std::string serialize_graph(const MetricGraph& g);

bool is_compact(const MetricGraph& g);

/// Edges touching `v`; loops contribute two entries.
std::vector<Incidence> incident_edges(const MetricGraph& g, std::string_view v);

/// Number of independent cycles (first Betti number) of the graph.
std::size_t cycle_rank(const MetricGraph& g);

}  // namespace magnograph
