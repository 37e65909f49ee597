#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gheur/common.hpp"

namespace gheur {

enum class SearchMode { exact, approximate };

struct AnnOptions {
  SearchMode mode = SearchMode::exact;
  std::uint64_t seed = 0;
  std::size_t trees = 4;        // approximate mode only
  std::size_t leaf_size = 8;
  std::size_t max_checks = 128;  // leaf points examined per query in approximate mode
};

// Row-major k-nearest results: row q holds the k neighbours of query q in
// non-decreasing distance order.
struct KnnResult {
  std::size_t k = 0;
  std::vector<std::size_t> indices;
  std::vector<double> dists;  // Euclidean

  std::size_t rows() const { return k == 0 ? 0 : indices.size() / k; }
  std::span<const std::size_t> row_indices(std::size_t q) const { return {indices.data() + q * k, k}; }
  std::span<const double> row_dists(std::size_t q) const { return {dists.data() + q * k, k}; }
};

struct Neighbor {
  double dist2;
  std::size_t index;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
};

// kd-tree index. Exact mode is a single median-split tree searched with full
// backtracking; approximate mode is a forest of randomized trees searched
// best-bin-first with a bounded number of leaf checks. Distance ties resolve
// toward the lower stored index in both modes.
class NNIndex {
 public:
  NNIndex(std::span<const double> points, std::size_t dim, const AnnOptions& options = {});

  std::size_t size() const { return dim_ == 0 ? 0 : points_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  SearchMode mode() const { return options_.mode; }
  std::span<const double> point(std::size_t i) const { return {points_.data() + i * dim_, dim_}; }

  // Neighbours of one query, sorted ascending by (distance, index).
  std::vector<Neighbor> query(std::span<const double> q, std::size_t k) const;

  KnnResult knn_search(std::span<const double> queries, std::size_t k,
                       Exec exec = Exec::parallel) const;

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // leaf range into order
    std::int32_t split_dim = -1;      // -1 marks a leaf
    double split_value = 0.0;
    std::uint32_t left = 0, right = 0;
  };
  struct Tree {
    std::vector<Node> nodes;
    std::vector<std::uint32_t> order;
  };

  std::uint32_t build_node(Tree& tree, std::uint32_t begin, std::uint32_t end,
                           std::mt19937_64* rng);
  void exact_search(const Tree& tree, std::uint32_t node, std::span<const double> q, std::size_t k,
                    std::vector<Neighbor>& heap) const;
  void query_into(std::span<const double> q, std::size_t k, std::vector<Neighbor>& heap) const;
  std::vector<Neighbor> approximate_query(std::span<const double> q, std::size_t k) const;

  std::size_t dim_;
  AnnOptions options_;
  std::vector<double> points_;
  std::vector<Tree> trees_;
};

}  // namespace gheur
