#include "gheur/ann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gheur/kernels.hpp"

namespace gheur {

namespace {

void push_bounded(std::vector<Neighbor>& heap, std::size_t k, Neighbor c) {
  if (heap.size() < k) {
    heap.push_back(c);
    std::push_heap(heap.begin(), heap.end());
  } else if (c < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = c;
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace

NNIndex::NNIndex(std::span<const double> points, std::size_t dim, const AnnOptions& options)
    : dim_(dim), options_(options), points_(points.begin(), points.end()) {
  if (dim_ == 0 || points_.empty()) throw Error("nearest-neighbour index needs at least one point");
  if (points_.size() % dim_ != 0) throw Error("point buffer is not a multiple of the dimension");
  if (options_.leaf_size == 0) options_.leaf_size = 1;
  const auto n = static_cast<std::uint32_t>(size());
  if (options_.mode == SearchMode::exact) {
    Tree t;
    t.order.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) t.order[i] = i;
    build_node(t, 0, n, nullptr);
    trees_.push_back(std::move(t));
  } else {
    std::mt19937_64 rng(options_.seed);
    const std::size_t count = std::max<std::size_t>(1, options_.trees);
    for (std::size_t ti = 0; ti < count; ++ti) {
      Tree t;
      t.order.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) t.order[i] = i;
      build_node(t, 0, n, &rng);
      trees_.push_back(std::move(t));
    }
  }
}

std::uint32_t NNIndex::build_node(Tree& tree, std::uint32_t begin, std::uint32_t end,
                                  std::mt19937_64* rng) {
  const auto id = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.push_back(Node{begin, end, -1, 0.0, 0, 0});
  if (end - begin <= options_.leaf_size) return id;

  auto coord = [&](std::uint32_t idx, std::size_t k) { return points_[idx * dim_ + k]; };

  // Spread and mean per dimension over the range.
  std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
  std::vector<double> mean(dim_, 0.0), var(dim_, 0.0);
  for (std::uint32_t i = begin; i < end; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const double v = coord(tree.order[i], k);
      lo[k] = std::min(lo[k], v);
      hi[k] = std::max(hi[k], v);
      mean[k] += v;
    }
  }
  const double count = static_cast<double>(end - begin);
  for (auto& m : mean) m /= count;
  std::size_t best_dim = 0;
  for (std::size_t k = 1; k < dim_; ++k)
    if (hi[k] - lo[k] > hi[best_dim] - lo[best_dim]) best_dim = k;
  if (hi[best_dim] - lo[best_dim] <= 0.0) return id;  // all points coincide

  std::size_t split_dim = best_dim;
  double split_value = 0.0;
  std::uint32_t mid = begin;
  bool use_median = true;

  if (rng != nullptr) {
    for (std::uint32_t i = begin; i < end; ++i)
      for (std::size_t k = 0; k < dim_; ++k) {
        const double t = coord(tree.order[i], k) - mean[k];
        var[k] += t * t;
      }
    std::vector<std::size_t> dims(dim_);
    for (std::size_t k = 0; k < dim_; ++k) dims[k] = k;
    std::stable_sort(dims.begin(), dims.end(), [&](auto a, auto b) { return var[a] > var[b]; });
    std::size_t top = std::min<std::size_t>(5, dim_);
    while (top > 1 && var[dims[top - 1]] <= 0.0) --top;
    split_dim = dims[std::uniform_int_distribution<std::size_t>(0, top - 1)(*rng)];
    split_value = mean[split_dim];
    auto it = std::partition(tree.order.begin() + begin, tree.order.begin() + end,
                             [&](std::uint32_t idx) { return coord(idx, split_dim) < split_value; });
    mid = static_cast<std::uint32_t>(it - tree.order.begin());
    use_median = (mid == begin || mid == end);
    if (use_median) split_dim = best_dim;
  }

  if (use_median) {
    mid = begin + (end - begin) / 2;
    std::nth_element(tree.order.begin() + begin, tree.order.begin() + mid, tree.order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double va = coord(a, split_dim), vb = coord(b, split_dim);
                       return va < vb || (va == vb && a < b);
                     });
    split_value = coord(tree.order[mid], split_dim);
  }

  const std::uint32_t left = build_node(tree, begin, mid, rng);
  const std::uint32_t right = build_node(tree, mid, end, rng);
  Node& node = tree.nodes[id];
  node.split_dim = static_cast<std::int32_t>(split_dim);
  node.split_value = split_value;
  node.left = left;
  node.right = right;
  return id;
}

void NNIndex::exact_search(const Tree& tree, std::uint32_t node_id, std::span<const double> q,
                           std::size_t k, std::vector<Neighbor>& heap) const {
  const Node& node = tree.nodes[node_id];
  if (node.split_dim < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = tree.order[i];
      push_bounded(heap, k, {kernels::squared_distance(q, point(idx)), idx});
    }
    return;
  }
  const double diff = q[static_cast<std::size_t>(node.split_dim)] - node.split_value;
  const std::uint32_t near = diff < 0.0 ? node.left : node.right;
  const std::uint32_t far = diff < 0.0 ? node.right : node.left;
  exact_search(tree, near, q, k, heap);
  // Equal bounds are still explored so lower-index ties can win.
  if (heap.size() < k || diff * diff <= heap.front().dist2) exact_search(tree, far, q, k, heap);
}

std::vector<Neighbor> NNIndex::approximate_query(std::span<const double> q, std::size_t k) const {
  struct Branch {
    double bound;
    std::uint32_t tree;
    std::uint32_t node;
    bool operator>(const Branch& o) const {
      return bound > o.bound || (bound == o.bound && (tree > o.tree || (tree == o.tree && node > o.node)));
    }
  };
  std::priority_queue<Branch, std::vector<Branch>, std::greater<>> pending;
  std::vector<char> seen(size(), 0);
  std::vector<Neighbor> heap;
  std::size_t checks = 0;

  auto descend = [&](std::uint32_t ti, std::uint32_t node_id) {
    const Tree& tree = trees_[ti];
    while (tree.nodes[node_id].split_dim >= 0) {
      const Node& node = tree.nodes[node_id];
      const double diff = q[static_cast<std::size_t>(node.split_dim)] - node.split_value;
      const std::uint32_t near = diff < 0.0 ? node.left : node.right;
      const std::uint32_t far = diff < 0.0 ? node.right : node.left;
      pending.push({diff * diff, ti, far});
      node_id = near;
    }
    const Node& leaf = tree.nodes[node_id];
    for (std::uint32_t i = leaf.begin; i < leaf.end; ++i) {
      const std::uint32_t idx = tree.order[i];
      if (seen[idx]) continue;
      seen[idx] = 1;
      ++checks;
      push_bounded(heap, k, {kernels::squared_distance(q, point(idx)), idx});
    }
  };

  for (std::uint32_t ti = 0; ti < trees_.size(); ++ti) descend(ti, 0);
  while (!pending.empty() && (checks < options_.max_checks || heap.size() < k)) {
    const Branch b = pending.top();
    pending.pop();
    if (heap.size() == k && b.bound > heap.front().dist2) continue;
    descend(b.tree, b.node);
  }
  return heap;
}

std::vector<Neighbor> NNIndex::query(std::span<const double> q, std::size_t k) const {
  if (q.size() != dim_) throw Error("query dimensionality does not match the index");
  if (k > size())
    throw Error("k (" + std::to_string(k) + ") exceeds stored point count (" + std::to_string(size()) +
                ")");
  std::vector<Neighbor> heap;
  query_into(q, k, heap);
  return heap;
}

void NNIndex::query_into(std::span<const double> q, std::size_t k, std::vector<Neighbor>& heap) const {
  heap.clear();
  if (k == 0) return;
  if (options_.mode == SearchMode::exact)
    exact_search(trees_.front(), 0, q, k, heap);
  else
    heap = approximate_query(q, k);
  std::sort(heap.begin(), heap.end());
}

KnnResult NNIndex::knn_search(std::span<const double> queries, std::size_t k, Exec exec) const {
  if (queries.size() % dim_ != 0) throw Error("query buffer is not a multiple of the dimension");
  if (k > size())
    throw Error("k (" + std::to_string(k) + ") exceeds stored point count (" + std::to_string(size()) +
                ")");
  const std::size_t nq = queries.size() / dim_;
  KnnResult r;
  r.k = k;
  r.indices.resize(nq * k);
  r.dists.resize(nq * k);
  auto one = [&](std::size_t qi, std::vector<Neighbor>& nb) {
    query_into(queries.subspan(qi * dim_, dim_), k, nb);
    for (std::size_t t = 0; t < k; ++t) {
      r.indices[qi * k + t] = nb[t].index;
      r.dists[qi * k + t] = std::sqrt(nb[t].dist2);
    }
  };
  if (exec == Exec::parallel) {
    const auto n = static_cast<std::int64_t>(nq);
#pragma omp parallel
    {
      std::vector<Neighbor> nb;
      nb.reserve(k + 1);
#pragma omp for schedule(dynamic, 256)
      for (std::int64_t qi = 0; qi < n; ++qi) one(static_cast<std::size_t>(qi), nb);
    }
  } else {
    std::vector<Neighbor> nb;
    nb.reserve(k + 1);
    for (std::size_t qi = 0; qi < nq; ++qi) one(qi, nb);
  }
  return r;
}

}  // namespace gheur
