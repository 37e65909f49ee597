#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gheur/clustering.hpp"
#include "gheur/knitting.hpp"
#include "test_support.hpp"

using namespace gheur;
using gheur::testing::make_clusters;

namespace {

const double kE = std::exp(1.0);

std::vector<Cluster> line_clusters(const std::vector<double>& xs, const std::vector<double>& tcs) {
  std::vector<std::vector<double>> centers;
  for (double x : xs) centers.push_back({x, 0.0});
  return make_clusters(centers, tcs);
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const PatternGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const auto& e : g.edges()) s.insert({e.u, e.v});
  return s;
}

std::vector<Cluster> random_clusters(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> centers;
  std::vector<double> tcs;
  for (std::size_t i = 0; i < n; ++i) {
    centers.push_back({u(rng), u(rng)});
    // Mostly pure clusters on either side of x = 0.5, some impure near it.
    const double x = centers.back()[0];
    double tc = x >= 0.5 ? 1.0 : -1.0;
    if (std::abs(x - 0.5) < 0.1) tc *= 0.2 + 0.8 * u(rng);
    tcs.push_back(tc);
  }
  return make_clusters(centers, tcs);
}

}  // namespace

TEST(EdgeWeight, PaperFixtureValues) {
  const double ce = std::exp(4.0);
  EXPECT_DOUBLE_EQ(edge_weight(1, 1, kE, ce), 3.0);
  EXPECT_NEAR(edge_weight(1, -1, kE, ce), 2 + std::exp(8.0), 1e-9);
  EXPECT_NEAR(edge_weight(1, -1, kE, ce), 2982.958, 1e-3);
  EXPECT_NEAR(edge_weight(0.5, 1, kE, ce), std::exp(0.5) + 1 + std::exp(2.0), 1e-12);
  EXPECT_NEAR(edge_weight(0.5, 1, kE, ce), 10.0378, 1e-4);
}

TEST(EdgeWeight, SymmetricAndMinimalAtPureSameClass) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double ce = std::exp(4.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_DOUBLE_EQ(edge_weight(a, b, kE, ce), edge_weight(b, a, kE, ce));
    EXPECT_GE(edge_weight(a, b, kE, ce), 3.0);
  }
  EXPECT_DOUBLE_EQ(edge_weight(-1, -1, kE, ce), 3.0);
}

TEST(ComputeReach, Examples) {
  EXPECT_DOUBLE_EQ(compute_reach(std::vector<double>{0.3}, 1.0), 0.3);
  EXPECT_NEAR(compute_reach(std::vector<double>{0.1, 0.2}, 2.0), 0.6, 1e-15);
  EXPECT_EQ(compute_reach(std::vector<double>{0.1, 0.2}, 0.0), 0.0);
  EXPECT_EQ(compute_reach(std::vector<double>{}, 3.0), 0.0);
}

TEST(Sns, TwoNodesGetOneEdge) {
  HeuristicParams p;
  p.nn = 1;
  p.max_same_class_neigh = 1;
  for (double other : {1.0, -1.0}) {
    PatternGraph g = sns(line_clusters({0, 1}, {1, other}), p);
    g.finalize(p.ci_init, p.ce_init);
    EXPECT_EQ(g.edge_count(), 1u);
  }
}

TEST(Sns, SameClassCapLeavesNodeUnfinished) {
  // Line 0,1,2,3 of class +1 and a class -1 node far away at 10. With nn = 3
  // and a same-class cap of 2, node 0 sees 1, 2, 3 first and keeps only 1, 2.
  HeuristicParams p;
  p.nn = 3;
  p.max_same_class_neigh = 2;
  const PatternGraph g = sns(line_clusters({0, 1, 2, 3, 10}, {1, 1, 1, 1, -1}), p);
  EXPECT_EQ(g.neigh_list[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(g.no_tot_neigh[0], 2u);
  EXPECT_FALSE(g.neigh_finished[0]);
  EXPECT_DOUBLE_EQ(g.reach[0], 3.0);  // 1 + 2
  // The lone class -1 node takes all three nearest as opposite-class edges.
  EXPECT_EQ(g.no_tot_neigh[4], 3u);
  EXPECT_TRUE(g.neigh_finished[4]);
  EXPECT_EQ(g.reach[4], 0.0);
}

TEST(Sns, SingleClassHasNoCrossEdges) {
  HeuristicParams p;
  p.nn = 2;
  p.max_same_class_neigh = 2;
  p.reach_scale = 1.5;
  const auto clusters = line_clusters({0, 1, 3, 6}, {1, 1, 1, 1});
  PatternGraph g = sns(clusters, p);
  EXPECT_DOUBLE_EQ(g.reach[0], 1.5 * (1 + 3));
  EXPECT_DOUBLE_EQ(g.reach[1], 1.5 * (1 + 2));
  EXPECT_DOUBLE_EQ(g.reach[2], 1.5 * (2 + 3));
  EXPECT_DOUBLE_EQ(g.reach[3], 1.5 * (3 + 5));
  g.finalize(p.ci_init, p.ce_init);
  for (const auto& e : g.edges()) EXPECT_DOUBLE_EQ(e.weight, 3.0);
}

TEST(Ens, ZeroReachAddsNothingAndFinishesQueries) {
  HeuristicParams p;
  p.nn = 3;
  p.max_same_class_neigh = 2;
  p.reach_scale = 0.0;
  PatternGraph g = sns(line_clusters({0, 1, 2, 3, 6.5, 7.5, 8.5, 9.5}, {-1, -1, -1, -1, 1, 1, 1, 1}), p);
  const auto before = g.neigh_list;
  ens_iteration(g, p);
  EXPECT_EQ(g.neigh_list, before);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_TRUE(g.neigh_finished[i]);
}

TEST(Ens, ZeroNeighLimitAddsNothing) {
  HeuristicParams p;
  p.nn = 3;
  p.max_same_class_neigh = 2;
  p.reach_scale = 100.0;
  p.neigh_limit = 0;
  PatternGraph g = sns(line_clusters({0, 1, 2, 3, 6.5, 7.5, 8.5, 9.5}, {-1, -1, -1, -1, 1, 1, 1, 1}), p);
  const auto before = g.neigh_list;
  ens_iteration(g, p);
  EXPECT_EQ(g.neigh_list, before);
}

TEST(Ens, BoundaryNodesGainCrossEdges) {
  // Hand trace with nn = 3, cap 2, R = 1.5: after SNS every node holds two
  // same-class edges. Node 3 has reach 1.5 * (1 + 2) = 4.5 and the nearest
  // opposite node at distance 3.5 is accepted; node 2 has reach 3 and its
  // nearest opposite node lies at 4.5, so it finishes without an edge.
  HeuristicParams p;
  p.nn = 3;
  p.max_same_class_neigh = 2;
  p.reach_scale = 1.5;
  PatternGraph g = sns(line_clusters({0, 1, 2, 3, 6.5, 7.5, 8.5, 9.5}, {-1, -1, -1, -1, 1, 1, 1, 1}), p);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_FALSE(g.neigh_finished[i]);
  ens_iteration(g, p);
  g.finalize(p.ci_init, p.ce_init);
  std::set<std::pair<std::size_t, std::size_t>> cross;
  for (const auto& e : g.edges())
    if (g.node_class(e.u) != g.node_class(e.v)) cross.insert({e.u, e.v});
  EXPECT_EQ(cross, (std::set<std::pair<std::size_t, std::size_t>>{{3, 4}}));
  EXPECT_EQ(g.node_neigh[3], 1u);
  EXPECT_EQ(g.node_neigh[4], 1u);
  for (std::size_t i : {0u, 1u, 2u, 5u, 6u, 7u}) EXPECT_TRUE(g.neigh_finished[i]);
}

TEST(ReduceSearchSpace, Examples) {
  const std::vector<std::size_t> nodes{0, 1, 2};
  EXPECT_EQ(reduce_search_space(nodes, std::vector<std::size_t>{0, 0, 5}, 5), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(reduce_search_space(nodes, std::vector<std::size_t>{0, 0, 0}, 1), nodes);
}

TEST(Knit, ZeroEnsIterationsEqualsSymmetrizedSns) {
  HeuristicParams p;
  const auto clusters = random_clusters(120, 3);
  PatternGraph s = sns(clusters, p);
  s.finalize(p.ci_init, p.ce_init);
  const PatternGraph k = knit(clusters, p);
  EXPECT_EQ(k.adjacency, s.adjacency);
}

TEST(Knit, PureTwoBlobWeights) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.05);
  std::vector<std::vector<double>> centers;
  std::vector<double> tcs;
  for (int i = 0; i < 40; ++i) {
    const bool pos = i % 2;
    centers.push_back({(pos ? 0.6 : 0.4) + g(rng), 0.5 + g(rng)});
    tcs.push_back(pos ? 1.0 : -1.0);
  }
  HeuristicParams p;
  p.ens_iters = 2;
  const PatternGraph k = knit(make_clusters(centers, tcs), p);
  std::size_t cross = 0;
  for (const auto& e : k.edges()) {
    if (k.node_class(e.u) != k.node_class(e.v)) {
      ++cross;
      EXPECT_NEAR(e.weight, 2 + p.ce_init * p.ce_init, 1e-9);
    } else {
      EXPECT_DOUBLE_EQ(e.weight, 3.0);
    }
  }
  EXPECT_GT(cross, 0u);
}

TEST(Knit, StructuralInvariantsOnRandomFixtures) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    HeuristicParams p;
    p.nn = 3 + seed % 4;
    p.max_same_class_neigh = 1 + seed % p.nn;
    p.neigh_limit = 2 + seed % 3;
    p.reach_scale = 1.0 + 0.1 * static_cast<double>(seed);
    p.ens_iters = seed % 4;
    const auto clusters = random_clusters(60 + 10 * seed, seed);

    const PatternGraph s = sns(clusters, p);
    for (std::size_t i = 0; i < s.node_count(); ++i) {
      std::size_t same = 0;
      for (auto j : s.neigh_list[i]) same += s.node_class(i) == s.node_class(j);
      EXPECT_LE(same, p.max_same_class_neigh);
      if (same == 0) {
        EXPECT_EQ(s.reach[i], 0.0);
      }
    }

    const PatternGraph g = knit(clusters, p);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      EXPECT_LE(g.neigh_list[i].size(), p.nn);
      EXPECT_LE(g.node_neigh[i], p.neigh_limit);
      EXPECT_TRUE(std::is_sorted(g.adjacency[i].begin(), g.adjacency[i].end(),
                                 [](const Edge& a, const Edge& b) { return a.to < b.to; }));
      for (const auto& e : g.adjacency[i]) {
        EXPECT_NE(e.to, i);
        const Edge* back = g.find_edge(e.to, i);
        ASSERT_NE(back, nullptr);
        EXPECT_EQ(back->weight, e.weight);
        EXPECT_DOUBLE_EQ(e.weight, edge_weight(g.nodes[i].tc, g.nodes[e.to].tc, p.ci_init, p.ce_init));
      }
    }
  }
}

TEST(Knit, EnsEdgeSetIsMonotone) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clusters = random_clusters(150, seed + 100);
    HeuristicParams p;
    p.nn = 5;
    p.max_same_class_neigh = 3;
    p.reach_scale = 1.5;
    auto prev = edge_set(knit(clusters, p));
    for (std::size_t it = 1; it <= 4; ++it) {
      p.ens_iters = it;
      const auto cur = edge_set(knit(clusters, p));
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) << seed << " " << it;
      prev = cur;
    }
  }
}

TEST(Knit, SearchSpaceShrinksOnTranslatedFixture) {
  // Table-1 style data with the positive class moved away from the plane, as
  // in the search-space reduction experiment: class spaces never grow.
  Dataset ds = gen_dataset_one(30000, 2, 0.0, 1);
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.target(i) > 0) ds.features(i)[0] += 0.1;
  const auto cl = cluster(ds, 300, 5, 1);
  HeuristicParams p;
  p.reach_scale = 1.0;
  PatternGraph g = sns(cl.clusters, p);
  std::size_t prev[2] = {g.class_space[0].size(), g.class_space[1].size()};
  EXPECT_EQ(prev[0] + prev[1], cl.clusters.size());
  for (int it = 0; it < 4; ++it) {
    ens_iteration(g, p);
    for (int c = 0; c < 2; ++c) {
      g.class_space[c] = reduce_search_space(g.class_space[c], g.node_neigh, p.neigh_limit);
      EXPECT_LE(g.class_space[c].size(), prev[c]);
      prev[c] = g.class_space[c].size();
    }
  }
}

TEST(HeuristicParams, Validation) {
  HeuristicParams p;
  EXPECT_NO_THROW(p.validate());
  p.max_same_class_neigh = p.nn + 1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.ci_init = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.nn = 0;
  EXPECT_THROW(p.validate(), Error);
}
