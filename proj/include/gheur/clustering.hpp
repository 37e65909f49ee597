#pragma once

#include <cstdint>
#include <vector>

#include "gheur/data.hpp"

namespace gheur {

// K-means cluster carrying the mean target of its members as a fractional class.
struct Cluster {
  std::size_t id = 0;
  std::vector<double> center;
  double tc = 0.0;  // in [-1, +1]
  std::vector<std::size_t> members;

  std::size_t size() const { return members.size(); }
  std::size_t positive_count() const;
  std::size_t negative_count() const { return size() - positive_count(); }
};

struct ClusteringResult {
  std::vector<Cluster> clusters;
  std::vector<std::size_t> assignment;  // point id -> cluster id
  std::size_t iterations_run = 0;
  std::size_t dim = 0;
  // Within-cluster sum of squares after each assignment step.
  std::vector<double> inertia_history;

  // Row-major centers in cluster-id order.
  std::vector<double> flat_centers() const;
};

// D^2-weighted seeding. Returns n_c row-major centers.
std::vector<double> kmeanspp_seed(const Dataset& ds, std::size_t n_c, std::uint64_t seed);

ClusteringResult cluster(const Dataset& ds, std::size_t n_c, std::size_t iters, std::uint64_t seed,
                         Exec exec = Exec::parallel);

double nominal_vc(const Dataset& ds, std::size_t n_c);

}  // namespace gheur
