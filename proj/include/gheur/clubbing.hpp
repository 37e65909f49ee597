#pragma once

#include <array>
#include <utility>
#include <vector>

#include "gheur/clustering.hpp"
#include "gheur/knitting.hpp"

namespace gheur {

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (lower id, higher id)
};

// Coarsening state. Supernodes keep the id of their smallest member cluster;
// contracted-away ids become inactive in `graph`.
class CoarsenState {
 public:
  explicit CoarsenState(PatternGraph graph);

  PatternGraph graph;
  std::vector<double> cost_history;

  std::size_t find(std::size_t id);
  bool is_critical(std::size_t id) const { return critical_[id] != 0; }
  std::vector<std::size_t> critical_nodes() const;

  // Original cluster ids that were active when coarsening started.
  const std::vector<std::size_t>& starting_nodes() const { return starting_; }

 private:
  friend void contract(CoarsenState&, const Matching&, const HeuristicParams&);
  std::vector<std::size_t> parent_;
  std::vector<char> critical_;
  std::vector<std::size_t> starting_;
};

// Greedy heaviest-first matching over edges with weight >= edge_cut. Ties in
// weight go to the lexicographically smaller (u, v).
Matching pwm(const PatternGraph& g, double edge_cut);

// Contracts every matched pair, re-evaluates the target class of the merged
// node and re-assesses its edges to other critical nodes. Throws on a stale
// matching.
void contract(CoarsenState& state, const Matching& m, const HeuristicParams& params);

// Sum of edge weights strictly above edge_cut.
double graph_cost(const PatternGraph& g, double edge_cut);

bool kink_detected(double prev_cost, double prev_prev_cost, double curr_cost, double theta);

struct Partition {
  std::size_t id = 0;
  std::vector<std::size_t> cluster_ids;
  std::vector<std::size_t> point_ids;
  std::array<std::size_t, 2> class_counts{0, 0};  // {-1, +1}

  std::size_t size() const { return point_ids.size(); }
};

struct PartitionSet {
  std::vector<Partition> partitions;

  std::size_t size() const { return partitions.size(); }
};

struct ClubResult {
  PartitionSet parts;
  std::vector<double> cost_history;          // entry 0 is the cost before coarsening
  std::vector<std::size_t> candidate_counts;  // active nodes scanned per matching
  std::vector<std::size_t> matching_sizes;
  std::size_t iterations_run = 0;
  bool kink = false;
};

// `g` is the shed view: only relevant nodes are active.
ClubResult club(const PatternGraph& g, const ClusteringResult& clustering,
                const HeuristicParams& params);

// One partition per relevant cluster (no coarsening).
PartitionSet singleton_partitions(const std::vector<std::size_t>& cluster_ids,
                                  const ClusteringResult& clustering);

}  // namespace gheur
