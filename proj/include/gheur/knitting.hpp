#pragma once

#include <cmath>
#include <span>
#include <tuple>
#include <vector>

#include "gheur/ann.hpp"
#include "gheur/clustering.hpp"

namespace gheur {

// Knobs of the whole reduction pipeline. Defaults reproduce the
// n = 30000, d = 2, n_c = 300 fixture with the GCH re-assessment constants.
struct HeuristicParams {
  std::size_t nn = 4;
  double reach_scale = 1.0;
  std::size_t max_same_class_neigh = 4;
  std::size_t neigh_limit = 4;
  double ci_init = std::exp(1.0);
  double ce_init = std::exp(4.0);
  double ci_reassess = std::exp(1.5);
  double ce_reassess = 1.0;
  double gs_edge_cut = 3.01;
  double gc_edge_cut = 3.20;
  std::size_t max_coarsen_iters = 10;
  std::size_t ens_iters = 0;
  bool stop_on_kink = false;
  double kink_theta = 0.2;

  // Clustering step. n_clusters == 0 derives it from the nominal VC dimension.
  std::size_t n_clusters = 0;
  double nominal_vc = 100.0;
  std::size_t cluster_iters = 5;
  std::uint64_t seed = 1;
  SearchMode search_mode = SearchMode::exact;

  std::size_t clusters_for(std::size_t n) const;
  void validate() const;
};

struct GraphNode {
  std::size_t cluster_id = 0;
  std::vector<double> center;
  double tc = 0.0;
  std::size_t size = 0;
};

struct Edge {
  std::size_t to;
  double weight;
  bool operator==(const Edge&) const = default;
};

struct WeightedEdge {
  std::size_t u, v;  // u < v
  double weight;
  bool operator==(const WeightedEdge&) const = default;
};

// Weighted graph over clusters. During knitting the directed neighbour lists
// and search bookkeeping are live; finalize() turns them into a symmetric
// adjacency sorted by neighbour id.
struct PatternGraph {
  std::vector<GraphNode> nodes;
  std::vector<std::vector<Edge>> adjacency;
  std::vector<char> active;  // nodes still in view (shedding removes nodes)

  std::vector<std::vector<std::size_t>> neigh_list;
  std::vector<double> reach;
  std::vector<char> neigh_finished;
  std::vector<std::size_t> no_tot_neigh;
  std::vector<std::size_t> no_same_class_neigh;
  std::vector<std::size_t> node_neigh;
  // ENS search spaces, index 0 holds class -1 nodes and index 1 class +1 nodes.
  std::vector<std::size_t> class_space[2];

  std::size_t node_count() const { return nodes.size(); }
  std::size_t active_count() const;
  std::size_t edge_count() const;
  std::vector<WeightedEdge> edges() const;  // canonical, sorted by (u, v)
  const Edge* find_edge(std::size_t u, std::size_t v) const;
  std::span<const double> center(std::size_t i) const { return nodes[i].center; }
  int node_class(std::size_t i) const { return sign_class(nodes[i].tc); }

  // Symmetric adjacency from the directed lists, weighted with (ci, ce).
  void finalize(double ci, double ce);
};

double edge_weight(double tc_i, double tc_j, double ci, double ce);

double compute_reach(std::span<const double> same_class_dists, double reach_scale);

PatternGraph make_graph(const std::vector<Cluster>& clusters);

PatternGraph sns(const std::vector<Cluster>& clusters, const HeuristicParams& params);

// One exclusive-neighbour iteration: class -1 queries against the class +1
// space, then the reverse pass. Mutates the directed lists in place.
void ens_iteration(PatternGraph& g, const HeuristicParams& params);

std::vector<std::size_t> reduce_search_space(std::span<const std::size_t> nodes,
                                             std::span<const std::size_t> node_neigh,
                                             std::size_t neigh_limit);

PatternGraph knit(const std::vector<Cluster>& clusters, const HeuristicParams& params);

}  // namespace gheur
