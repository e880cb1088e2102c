#include <gtest/gtest.h>

#include <random>

#include "magnograph/error.hpp"
#include "magnograph/graph.hpp"
#include "support.hpp"

using namespace magnograph;
using namespace testing_support;

TEST(GraphParse, SingleEdge) {
  auto g = parse_graph("v0 -- v1 : 3.14159\n");
  EXPECT_EQ(g.vertices().size(), 2u);
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_DOUBLE_EQ(g.edges()[0].length, 3.14159);
  EXPECT_FALSE(g.edges()[0].is_half_line());
  EXPECT_TRUE(is_compact(g));
}

TEST(GraphParse, LoopIsCompactWithOneVertex) {
  auto g = parse_graph("v0 -- v0 : 6.28\n");
  EXPECT_EQ(g.vertices().size(), 1u);
  EXPECT_EQ(g.edges().size(), 1u);
  EXPECT_TRUE(g.edges()[0].is_loop());
  EXPECT_TRUE(is_compact(g));
  EXPECT_EQ(cycle_rank(g), 1u);
}

TEST(GraphParse, StarCoreIsTheBoundedEdge) {
  auto g = parse_graph("v0 -- v1 : 1 b\nv0 --> inf\nv0 --> inf\nv0 --> inf\n");
  EXPECT_FALSE(is_compact(g));
  EXPECT_EQ(g.compact_core(), std::set<std::string>{"b"});
  // Without a core statement a noncompact graph carries the nonlinearity on its core.
  EXPECT_EQ(g.region_edges(), std::set<std::string>{"b"});
}

TEST(GraphParse, CommentsVerticesAndCoreOverride) {
  auto g = parse_graph(
      "# a tadpole\n"
      "vertex a 0 0\n"
      "a -- a : 2 loop\n"
      "a -- b : 1 stem\n"
      "core subgraph stem\n");
  EXPECT_EQ(g.nonlinearity_region().kind, RegionKind::Subgraph);
  EXPECT_EQ(g.region_edges(), std::set<std::string>{"stem"});
  ASSERT_TRUE(g.vertices()[0].position_hint.has_value());
}

TEST(GraphParse, Errors) {
  EXPECT_THROW(parse_graph("v0 -- v1 : abc\n"), ParseError);
  EXPECT_THROW(parse_graph("v0 -> v1 : 1\n"), ParseError);
  EXPECT_THROW(parse_graph("v0 -- v1 : 0\n"), ValidationError);
  EXPECT_THROW(parse_graph("v0 -- v1 : -1\n"), ValidationError);
  EXPECT_THROW(parse_graph("v0 -- v1 : 1\nv2 -- v3 : 1\n"), ValidationError);  // disconnected
  EXPECT_THROW(parse_graph("vertex lonely\nv0 -- v1 : 1\n"), ValidationError);  // dangling vertex
  EXPECT_THROW(parse_graph("v0 -- v1 : 1\ncore subgraph nope\n"), ValidationError);
  EXPECT_THROW(parse_graph(""), ValidationError);
}

TEST(GraphCompact, Examples) {
  EXPECT_TRUE(is_compact(parse_graph(kInterval)));
  EXPECT_FALSE(is_compact(parse_graph("v0 -- v0 : 1\nv0 --> inf\n")));
  auto line = parse_graph("v0 --> inf\nv0 --> inf\n");
  EXPECT_FALSE(is_compact(line));
  EXPECT_TRUE(line.compact_core().empty());
}

TEST(GraphIncidence, Examples) {
  auto star = parse_graph("c -- a : 1\nc -- b : 1\nc -- d : 1\n");
  EXPECT_EQ(incident_edges(star, "c").size(), 3u);
  EXPECT_EQ(incident_edges(star, "a").size(), 1u);
  auto loop = parse_graph("v0 -- v0 : 1 e\n");
  auto inc = incident_edges(loop, "v0");
  ASSERT_EQ(inc.size(), 2u);
  EXPECT_EQ(inc[0].edge, "e");
  EXPECT_EQ(inc[1].edge, "e");
  EXPECT_NE(inc[0].endpoint, inc[1].endpoint);
  EXPECT_THROW(incident_edges(loop, "zz"), UnknownVertex);
}

namespace {

// Random connected graph: a spanning tree plus extra edges, loops and rays.
MetricGraph random_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(1, 6);
  std::uniform_real_distribution<double> len(0.2, 3.0);
  const int n = nv(rng);
  std::string text;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    text += "v" + std::to_string(parent(rng)) + " -- v" + std::to_string(i) + " : " + fmt17(len(rng)) + "\n";
  }
  std::uniform_int_distribution<int> pick(0, n - 1), extra(0, 3);
  for (int k = extra(rng); k > 0; --k)
    text += "v" + std::to_string(pick(rng)) + " -- v" + std::to_string(pick(rng)) + " : " + fmt17(len(rng)) + "\n";
  for (int k = extra(rng) / 2; k > 0; --k) text += "v" + std::to_string(pick(rng)) + " --> inf\n";
  if (n == 1 && text.empty()) text = "v0 -- v0 : 1\n";
  return parse_graph(text);
}

}  // namespace

TEST(GraphProperties, RoundTripDegreeSumAndCore) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const MetricGraph g = random_graph(rng);
    EXPECT_EQ(parse_graph(serialize_graph(g)), g);
    std::size_t degree_sum = 0, bounded = 0, half = 0;
    for (const auto& v : g.vertices()) degree_sum += incident_edges(g, v.id).size();
    for (const auto& e : g.edges()) (e.is_half_line() ? half : bounded)++;
    EXPECT_EQ(degree_sum, 2 * bounded + half);
    EXPECT_EQ(!g.compact_core().empty(), bounded > 0);
  }
}
