#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gheur/clustering.hpp"
#include "gheur/knitting.hpp"
#include "gheur/shedding.hpp"
#include "test_support.hpp"

using namespace gheur;
using gheur::testing::weighted_graph;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Shed, Examples) {
  // Node 0: weights {3.0, 2.5}. Node 3: one heavy cross edge. Node 5 isolated.
  const PatternGraph g =
      weighted_graph(6, {{0, 1, 3.0}, {0, 2, 2.5}, {3, 4, 2 + std::exp(8.0)}, {1, 2, 3.0}});
  const auto kept = shed(g, 3.01);
  EXPECT_EQ(kept, (std::vector<std::size_t>{3, 4}));
}

TEST(Shed, CutIsInclusive) {
  const PatternGraph g = weighted_graph(2, {{0, 1, 3.2}});
  EXPECT_EQ(shed(g, 3.2).size(), 2u);
  EXPECT_TRUE(shed(g, std::nextafter(3.2, 4.0)).empty());
}

TEST(Shed, ExtremeCutsAndMonotonicity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(2.0, 40.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng() % 40;
    std::vector<WeightedEdge> edges;
    double max_w = 0;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng() % 5 == 0) {
          edges.push_back({u, v, w(rng)});
          max_w = std::max(max_w, edges.back().weight);
        }
    const PatternGraph g = weighted_graph(n, edges);
    EXPECT_EQ(shed(g, -kInf).size(), n);
    EXPECT_TRUE(shed(g, max_w + 1).empty());
    std::vector<std::size_t> prev = shed(g, 0.0);
    for (double cut = 2.0; cut < 42.0; cut += 1.5) {
      const auto cur = shed(g, cut);
      EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
      prev = cur;
    }
  }
}

TEST(Shed, InactiveNodesStayOut) {
  PatternGraph g = weighted_graph(3, {{0, 1, 10.0}, {1, 2, 10.0}});
  g.active[1] = 0;
  EXPECT_EQ(shed(g, 3.01), (std::vector<std::size_t>{0, 2}));
  const PatternGraph r = restrict_to(g, {0, 2});
  EXPECT_TRUE(shed(r, 3.01).empty());
  EXPECT_TRUE(r.adjacency[0].empty());
}

TEST(Expand, Examples) {
  ClusteringResult c;
  Cluster a;
  a.id = 0;
  for (std::size_t i = 0; i < 10; ++i) a.members.push_back(i);
  Cluster b;
  b.id = 1;
  b.members = {12, 10, 11};
  c.clusters = {a, b};
  EXPECT_EQ(expand({0}, c).size(), 10u);
  EXPECT_TRUE(expand({}, c).empty());
  EXPECT_EQ(expand({1}, c), (std::vector<std::size_t>{10, 11, 12}));
  EXPECT_EQ(expand({1, 0, 1}, c).size(), 13u);
}

TEST(Expand, NominalVcSizing) {
  const Dataset ds = gen_dataset_one(20000, 2, 0.02, 2);
  const auto cl = cluster(ds, 200, 5, 2);
  HeuristicParams p;
  const PatternGraph g = knit(cl.clusters, p);
  const RelevantSet rel = relevant_set(g, cl, p.gs_edge_cut);
  ASSERT_FALSE(rel.degenerate());
  const double expected = 100.0 * static_cast<double>(rel.cluster_ids.size());
  EXPECT_NEAR(static_cast<double>(rel.point_ids.size()), expected, 0.25 * expected);
  EXPECT_EQ(rel.per_class_counts[0] + rel.per_class_counts[1], rel.point_ids.size());
}

TEST(ImbalanceSd, Values) {
  EXPECT_DOUBLE_EQ(imbalance_sd({1743, 10256}), 4256.5);
  EXPECT_DOUBLE_EQ(imbalance_sd({1661, 2001}), 170.0);
  EXPECT_DOUBLE_EQ(imbalance_sd({7, 7}), 0.0);
}

TEST(Shed, KeptClustersTouchTheBoundary) {
  // Pure interiors and a mixed boundary: every kept cluster is impure or has
  // an opposite-class or impure neighbour.
  const Dataset ds = gen_dataset_one(30000, 2, 0.02, 1);
  const auto cl = cluster(ds, 300, 5, 1);
  HeuristicParams p;
  const PatternGraph g = knit(cl.clusters, p);
  const auto kept = shed(g, p.gs_edge_cut);
  ASSERT_FALSE(kept.empty());
  EXPECT_LT(kept.size(), cl.clusters.size() / 2);
  for (auto i : kept) {
    if (std::abs(g.nodes[i].tc) < 1.0) continue;
    bool near = false;
    for (const auto& e : g.adjacency[i])
      near |= g.node_class(e.to) != g.node_class(i) || std::abs(g.nodes[e.to].tc) < 1.0;
    EXPECT_TRUE(near) << "cluster " << i;
  }
}
