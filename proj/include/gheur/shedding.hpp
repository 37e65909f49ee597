#pragma once

#include <array>
#include <vector>

#include "gheur/clustering.hpp"
#include "gheur/knitting.hpp"

namespace gheur {

struct RelevantSet {
  std::vector<std::size_t> cluster_ids;
  std::vector<std::size_t> point_ids;  // sorted, duplicate-free
  std::array<std::size_t, 2> per_class_counts{0, 0};  // {-1, +1}

  bool degenerate() const { return cluster_ids.empty(); }
};

// Ids of active nodes with at least one incident edge of weight >= edge_cut.
// A cut of -infinity keeps every active node.
std::vector<std::size_t> shed(const PatternGraph& g, double edge_cut);

// Graph view with every non-listed node deactivated and its edges removed.
PatternGraph restrict_to(const PatternGraph& g, const std::vector<std::size_t>& keep);

std::vector<std::size_t> expand(const std::vector<std::size_t>& cluster_ids,
                                const ClusteringResult& clustering);

RelevantSet relevant_set(const PatternGraph& g, const ClusteringResult& clustering, double edge_cut);

// Population standard deviation of the two class counts, |c1 - c2| / 2.
double imbalance_sd(std::array<std::size_t, 2> counts);

}  // namespace gheur
