#include "gheur/knitting.hpp"

#include <algorithm>
#include <cmath>

namespace gheur {

std::size_t HeuristicParams::clusters_for(std::size_t n) const {
  if (n_clusters > 0) return std::min(n_clusters, n);
  const auto c = static_cast<std::size_t>(std::llround(static_cast<double>(n) / nominal_vc));
  return std::clamp<std::size_t>(c, 1, n);
}

void HeuristicParams::validate() const {
  if (nn < 1) throw Error("nn must be at least 1");
  if (max_same_class_neigh > nn) throw Error("max_same_class_neigh must not exceed nn");
  if (!(reach_scale >= 0.0)) throw Error("reach scale must be non-negative");
  if (!(ci_init > 0 && ce_init > 0 && ci_reassess > 0 && ce_reassess > 0))
    throw Error("edge weight constants must be positive");
  if (!(kink_theta > 0.0 && kink_theta < 1.0)) throw Error("kink_theta must lie in (0,1)");
  if (!(nominal_vc > 0.0)) throw Error("nominal_vc must be positive");
  if (cluster_iters < 1) throw Error("cluster_iters must be at least 1");
}

double edge_weight(double tc_i, double tc_j, double ci, double ce) {
  return std::pow(ci, 1.0 - std::abs(tc_i)) + std::pow(ci, 1.0 - std::abs(tc_j)) +
         std::pow(ce, std::abs(tc_i - tc_j));
}

double compute_reach(std::span<const double> same_class_dists, double reach_scale) {
  double s = 0.0;
  for (double d : same_class_dists) s += d;
  return reach_scale * s;
}

std::size_t PatternGraph::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
}

std::size_t PatternGraph::edge_count() const {
  std::size_t s = 0;
  for (const auto& a : adjacency) s += a.size();
  return s / 2;
}

std::vector<WeightedEdge> PatternGraph::edges() const {
  std::vector<WeightedEdge> out;
  for (std::size_t u = 0; u < adjacency.size(); ++u)
    for (const auto& e : adjacency[u])
      if (u < e.to) out.push_back({u, e.to, e.weight});
  return out;
}

const Edge* PatternGraph::find_edge(std::size_t u, std::size_t v) const {
  const auto& a = adjacency[u];
  auto it = std::lower_bound(a.begin(), a.end(), v, [](const Edge& e, std::size_t x) { return e.to < x; });
  return (it != a.end() && it->to == v) ? &*it : nullptr;
}

void PatternGraph::finalize(double ci, double ce) {
  const std::size_t n = nodes.size();
  adjacency.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : neigh_list[i]) {
      if (i == j) continue;
      const double w = edge_weight(nodes[i].tc, nodes[j].tc, ci, ce);
      adjacency[i].push_back({j, w});
      adjacency[j].push_back({i, w});
    }
  }
  for (auto& a : adjacency) {
    std::sort(a.begin(), a.end(), [](const Edge& x, const Edge& y) { return x.to < y.to; });
    a.erase(std::unique(a.begin(), a.end(), [](const Edge& x, const Edge& y) { return x.to == y.to; }),
            a.end());
  }
}

PatternGraph make_graph(const std::vector<Cluster>& clusters) {
  PatternGraph g;
  const std::size_t n = clusters.size();
  g.nodes.reserve(n);
  for (const auto& c : clusters) g.nodes.push_back({c.id, c.center, c.tc, c.size()});
  g.adjacency.assign(n, {});
  g.active.assign(n, 1);
  g.neigh_list.assign(n, {});
  g.reach.assign(n, 0.0);
  g.neigh_finished.assign(n, 0);
  g.no_tot_neigh.assign(n, 0);
  g.no_same_class_neigh.assign(n, 0);
  g.node_neigh.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) g.class_space[g.node_class(i) > 0 ? 1 : 0].push_back(i);
  return g;
}

namespace {

std::vector<double> gather_centers(const PatternGraph& g, std::span<const std::size_t> ids) {
  std::vector<double> out;
  if (ids.empty()) return out;
  out.reserve(ids.size() * g.nodes[ids[0]].center.size());
  for (auto id : ids) out.insert(out.end(), g.nodes[id].center.begin(), g.nodes[id].center.end());
  return out;
}

AnnOptions ann_options(const HeuristicParams& p) {
  AnnOptions o;
  o.mode = p.search_mode;
  o.seed = p.seed;
  return o;
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Queries from `from` against an index over `to` (opposite class).
void ens_pass(PatternGraph& g, const std::vector<std::size_t>& from, const std::vector<std::size_t>& to,
              const HeuristicParams& params) {
  if (from.empty() || to.empty()) return;
  const std::size_t d = g.nodes[to[0]].center.size();
  const NNIndex index(gather_centers(g, to), d, ann_options(params));
  for (std::size_t i : from) {
    if (g.neigh_finished[i]) continue;
    if (g.no_tot_neigh[i] >= params.nn) continue;
    const std::size_t remainder = params.nn - g.no_tot_neigh[i];
    const std::size_t k = std::min(remainder, to.size());
    for (const auto& nb : index.query(g.center(i), k)) {
      const std::size_t j = to[nb.index];
      const double dist = std::sqrt(nb.dist2);
      if (g.node_neigh[j] < params.neigh_limit && g.reach[i] > dist && !contains(g.neigh_list[i], j)) {
        g.neigh_list[i].push_back(j);
        ++g.no_tot_neigh[i];
        ++g.node_neigh[j];
      }
      if (dist > g.reach[i]) g.neigh_finished[i] = 1;  // not on the convex hull
    }
  }
}

}  // namespace

PatternGraph sns(const std::vector<Cluster>& clusters, const HeuristicParams& params) {
  params.validate();
  PatternGraph g = make_graph(clusters);
  const std::size_t n = g.nodes.size();
  if (n < 2) return g;
  const std::size_t d = g.nodes[0].center.size();
  const std::vector<double> centers = gather_centers(g, [&] {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }());
  const NNIndex index(centers, d, ann_options(params));
  const std::size_t k = std::min(params.nn + 1, n);
  const KnnResult knn = index.knn_search(centers, k);

  std::vector<double> same_dists;
  for (std::size_t i = 0; i < n; ++i) {
    same_dists.clear();
    std::size_t taken = 0;
    const auto idx = knn.row_indices(i);
    const auto dist = knn.row_dists(i);
    for (std::size_t t = 0; t < k && taken < params.nn; ++t) {
      const std::size_t j = idx[t];
      if (j == i) continue;
      ++taken;
      const bool same = g.node_class(i) == g.node_class(j);
      if (same && g.no_same_class_neigh[i] < params.max_same_class_neigh) {
        g.neigh_list[i].push_back(j);
        same_dists.push_back(dist[t]);
        ++g.no_tot_neigh[i];
        ++g.no_same_class_neigh[i];
      }
      if (!same) {
        g.neigh_list[i].push_back(j);
        ++g.no_tot_neigh[i];
      }
    }
    g.reach[i] = compute_reach(same_dists, params.reach_scale);
    if (g.no_tot_neigh[i] == params.nn) g.neigh_finished[i] = 1;
  }
  return g;
}

void ens_iteration(PatternGraph& g, const HeuristicParams& params) {
  ens_pass(g, g.class_space[0], g.class_space[1], params);
  ens_pass(g, g.class_space[1], g.class_space[0], params);
}

std::vector<std::size_t> reduce_search_space(std::span<const std::size_t> nodes,
                                             std::span<const std::size_t> node_neigh,
                                             std::size_t neigh_limit) {
  std::vector<std::size_t> kept;
  for (std::size_t i : nodes)
    if (node_neigh[i] < neigh_limit) kept.push_back(i);
  return kept;
}

PatternGraph knit(const std::vector<Cluster>& clusters, const HeuristicParams& params) {
  PatternGraph g = sns(clusters, params);
  for (std::size_t it = 0; it < params.ens_iters; ++it) {
    ens_iteration(g, params);
    for (auto& space : g.class_space)
      space = reduce_search_space(space, g.node_neigh, params.neigh_limit);
  }
  g.finalize(params.ci_init, params.ce_init);
  return g;
}

}  // namespace gheur
