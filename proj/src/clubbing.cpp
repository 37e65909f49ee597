#include "gheur/clubbing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gheur/shedding.hpp"

namespace gheur {

namespace {

void upsert_max(std::vector<Edge>& adj, std::size_t to, double w) {
  auto it = std::lower_bound(adj.begin(), adj.end(), to, [](const Edge& e, std::size_t x) { return e.to < x; });
  if (it != adj.end() && it->to == to)
    it->weight = std::max(it->weight, w);
  else
    adj.insert(it, {to, w});
}

void set_weight(std::vector<Edge>& adj, std::size_t to, double w) {
  auto it = std::lower_bound(adj.begin(), adj.end(), to, [](const Edge& e, std::size_t x) { return e.to < x; });
  if (it != adj.end() && it->to == to)
    it->weight = w;
  else
    adj.insert(it, {to, w});
}

void erase_edge(std::vector<Edge>& adj, std::size_t to) {
  auto it = std::lower_bound(adj.begin(), adj.end(), to, [](const Edge& e, std::size_t x) { return e.to < x; });
  if (it != adj.end() && it->to == to) adj.erase(it);
}

Partition make_partition(std::size_t id, std::vector<std::size_t> clusters,
                         const ClusteringResult& clustering) {
  Partition p;
  p.id = id;
  std::sort(clusters.begin(), clusters.end());
  p.point_ids = expand(clusters, clustering);
  for (auto c : clusters) {
    p.class_counts[0] += clustering.clusters[c].negative_count();
    p.class_counts[1] += clustering.clusters[c].positive_count();
  }
  p.cluster_ids = std::move(clusters);
  return p;
}

}  // namespace

CoarsenState::CoarsenState(PatternGraph g)
    : graph(std::move(g)), parent_(graph.node_count()), critical_(graph.node_count(), 0) {
  for (std::size_t i = 0; i < parent_.size(); ++i) {
    parent_[i] = i;
    if (graph.active[i]) starting_.push_back(i);
  }
}

std::size_t CoarsenState::find(std::size_t id) {
  std::size_t root = id;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[id] != root) {
    const std::size_t next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

std::vector<std::size_t> CoarsenState::critical_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < critical_.size(); ++i)
    if (critical_[i]) out.push_back(i);
  return out;
}

Matching pwm(const PatternGraph& g, double edge_cut) {
  std::vector<WeightedEdge> candidates;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    if (!g.active[u]) continue;
    for (const auto& e : g.adjacency[u])
      if (u < e.to && e.weight >= edge_cut) candidates.push_back({u, e.to, e.weight});
  }
  std::sort(candidates.begin(), candidates.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  Matching m;
  std::vector<char> visited(g.node_count(), 0);
  for (const auto& e : candidates) {
    if (visited[e.u] || visited[e.v]) continue;
    m.pairs.emplace_back(e.u, e.v);
    visited[e.u] = visited[e.v] = 1;
  }
  return m;
}

void contract(CoarsenState& state, const Matching& m, const HeuristicParams& params) {
  PatternGraph& g = state.graph;
  std::vector<char> used(g.node_count(), 0);
  for (auto [a, b] : m.pairs) {
    if (a == b || a >= g.node_count() || b >= g.node_count() || !g.active[a] || !g.active[b] ||
        used[a] || used[b] || g.find_edge(a, b) == nullptr)
      throw Error("stale matching: pair (" + std::to_string(a) + ", " + std::to_string(b) +
                  ") is not an edge of the current graph");
    used[a] = used[b] = 1;
  }

  std::vector<std::size_t> new_critical;
  for (auto [a, b] : m.pairs) {
    const std::size_t keep = std::min(a, b);
    const std::size_t gone = std::max(a, b);
    GraphNode& nk = g.nodes[keep];
    const GraphNode& ng = g.nodes[gone];

    const double sk = static_cast<double>(nk.size), sg = static_cast<double>(ng.size);
    const double total = sk + sg;
    // Point-count weighting makes tc the mean target of all underlying points.
    nk.tc = (nk.tc * sk + ng.tc * sg) / total;
    for (std::size_t t = 0; t < nk.center.size(); ++t)
      nk.center[t] = (nk.center[t] * sk + ng.center[t] * sg) / total;
    nk.size += ng.size;

    std::vector<Edge> moved = std::move(g.adjacency[gone]);
    g.adjacency[gone].clear();
    erase_edge(g.adjacency[keep], gone);
    for (const Edge& e : moved) {
      if (e.to == keep) continue;
      erase_edge(g.adjacency[e.to], gone);
      upsert_max(g.adjacency[keep], e.to, e.weight);
    }
    for (const Edge& e : g.adjacency[keep]) set_weight(g.adjacency[e.to], keep, e.weight);

    g.active[gone] = 0;
    state.parent_[gone] = keep;
    state.critical_[gone] = 0;
    state.critical_[keep] = 1;
    new_critical.push_back(keep);
  }

  for (std::size_t i : new_critical) {
    for (Edge& e : g.adjacency[i]) {
      if (!state.critical_[e.to]) continue;
      const double w = edge_weight(g.nodes[i].tc, g.nodes[e.to].tc, params.ci_reassess, params.ce_reassess);
      e.weight = w;
      set_weight(g.adjacency[e.to], i, w);
    }
  }
}

double graph_cost(const PatternGraph& g, double edge_cut) {
  double cost = 0.0;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    if (!g.active[u]) continue;
    for (const auto& e : g.adjacency[u])
      if (u < e.to && e.weight > edge_cut) cost += e.weight;
  }
  return cost;
}

bool kink_detected(double prev_cost, double prev_prev_cost, double curr_cost, double theta) {
  return std::abs(curr_cost - prev_cost) < theta * std::abs(prev_cost - prev_prev_cost);
}

ClubResult club(const PatternGraph& g, const ClusteringResult& clustering,
                const HeuristicParams& params) {
  CoarsenState state(g);
  ClubResult r;
  state.cost_history.push_back(graph_cost(state.graph, params.gc_edge_cut));
  while (r.iterations_run < params.max_coarsen_iters) {
    const Matching m = pwm(state.graph, params.gc_edge_cut);
    r.candidate_counts.push_back(state.graph.active_count());
    r.matching_sizes.push_back(m.pairs.size());
    if (m.pairs.empty()) break;
    contract(state, m, params);
    ++r.iterations_run;
    state.cost_history.push_back(graph_cost(state.graph, params.gc_edge_cut));
    const auto& h = state.cost_history;
    // Kinks are looked for from the third iteration on.
    if (params.stop_on_kink && r.iterations_run >= 3 &&
        kink_detected(h[h.size() - 2], h[h.size() - 3], h.back(), params.kink_theta)) {
      r.kink = true;
      break;
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t c : state.starting_nodes()) components[state.find(c)].push_back(c);
  for (auto& [root, members] : components)
    r.parts.partitions.push_back(make_partition(r.parts.partitions.size(), std::move(members), clustering));
  r.cost_history = std::move(state.cost_history);
  return r;
}

PartitionSet singleton_partitions(const std::vector<std::size_t>& cluster_ids,
                                  const ClusteringResult& clustering) {
  PartitionSet ps;
  for (auto c : cluster_ids) ps.partitions.push_back(make_partition(ps.partitions.size(), {c}, clustering));
  return ps;
}

}  // namespace gheur
