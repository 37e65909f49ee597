#include "gheur/shedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gheur {

std::vector<std::size_t> shed(const PatternGraph& g, double edge_cut) {
  std::vector<std::size_t> relevant;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!g.active[i]) continue;
    // An unbounded cut keeps isolated nodes too.
    const bool critical =
        edge_cut == -std::numeric_limits<double>::infinity() ||
        std::any_of(g.adjacency[i].begin(), g.adjacency[i].end(),
                    [&](const Edge& e) { return e.weight >= edge_cut; });
    if (critical) relevant.push_back(i);
  }
  return relevant;
}

PatternGraph restrict_to(const PatternGraph& g, const std::vector<std::size_t>& keep) {
  PatternGraph out = g;
  std::fill(out.active.begin(), out.active.end(), 0);
  for (auto id : keep) out.active[id] = 1;
  for (std::size_t i = 0; i < out.node_count(); ++i) {
    if (!out.active[i]) {
      out.adjacency[i].clear();
      continue;
    }
    auto& a = out.adjacency[i];
    a.erase(std::remove_if(a.begin(), a.end(), [&](const Edge& e) { return !out.active[e.to]; }),
            a.end());
  }
  return out;
}

std::vector<std::size_t> expand(const std::vector<std::size_t>& cluster_ids,
                                const ClusteringResult& clustering) {
  std::vector<std::size_t> points;
  for (auto id : cluster_ids) {
    const auto& m = clustering.clusters.at(id).members;
    points.insert(points.end(), m.begin(), m.end());
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

RelevantSet relevant_set(const PatternGraph& g, const ClusteringResult& clustering, double edge_cut) {
  RelevantSet rel;
  rel.cluster_ids = shed(g, edge_cut);
  rel.point_ids = expand(rel.cluster_ids, clustering);
  for (auto id : rel.cluster_ids) {
    const auto& c = clustering.clusters[id];
    rel.per_class_counts[0] += c.negative_count();
    rel.per_class_counts[1] += c.positive_count();
  }
  return rel;
}

double imbalance_sd(std::array<std::size_t, 2> counts) {
  const double a = static_cast<double>(counts[0]);
  const double b = static_cast<double>(counts[1]);
  return std::abs(a - b) / 2.0;
}

}  // namespace gheur
