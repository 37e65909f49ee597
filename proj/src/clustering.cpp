#include "gheur/clustering.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "gheur/kernels.hpp"

namespace gheur {

std::size_t Cluster::positive_count() const {
  return static_cast<std::size_t>(std::llround((tc + 1.0) * static_cast<double>(size()) / 2.0));
}

std::vector<double> ClusteringResult::flat_centers() const {
  std::vector<double> out;
  out.reserve(clusters.size() * dim);
  for (const auto& c : clusters) out.insert(out.end(), c.center.begin(), c.center.end());
  return out;
}

std::vector<double> kmeanspp_seed(const Dataset& ds, std::size_t n_c, std::uint64_t seed) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  if (n_c < 1) throw Error("n_c must be at least 1");
  if (n_c > n)
    throw Error("n_c (" + std::to_string(n_c) + ") exceeds the number of points (" +
                std::to_string(n) + ")");

  std::mt19937_64 rng(seed);
  std::vector<double> centers;
  centers.reserve(n_c * d);
  std::vector<char> chosen(n, 0);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t idx) {
    chosen[idx] = 1;
    auto f = ds.features(idx);
    centers.insert(centers.end(), f.begin(), f.end());
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = kernels::squared_distance(ds.features(i), f);
      if (d2 < min_d2[i]) min_d2[i] = d2;
    }
  };

  take(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centers.size() < n_c * d) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i]) total += min_d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || min_d2[i] == 0.0) continue;
        acc += min_d2[i];
        pick = i;
        if (acc > r) break;
      }
    } else {
      // Only duplicates of existing centers remain; fall back to uniform.
      const std::size_t remaining = n - centers.size() / d;
      std::size_t skip = std::uniform_int_distribution<std::size_t>(0, remaining - 1)(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        if (skip-- == 0) {
          pick = i;
          break;
        }
      }
    }
    take(pick);
  }
  return centers;
}

ClusteringResult cluster(const Dataset& ds, std::size_t n_c, std::size_t iters, std::uint64_t seed,
                         Exec exec) {
  if (iters < 1) throw Error("clustering needs at least one iteration");
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  std::vector<double> centers = kmeanspp_seed(ds, n_c, seed);

  ClusteringResult result;
  result.dim = d;
  std::vector<std::uint32_t> assign(n, 0), previous;
  std::vector<double> sums(n_c * d);
  std::vector<std::size_t> counts(n_c);
  for (std::size_t it = 0; it < iters; ++it) {
    const double inertia = kernels::assign_to_centers(exec, ds.values(), centers, d, assign);
    result.inertia_history.push_back(inertia);
    ++result.iterations_run;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto f = ds.features(i);
      double* s = sums.data() + assign[i] * d;
      for (std::size_t k = 0; k < d; ++k) s[k] += f[k];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < n_c; ++c) {
      if (counts[c] == 0) continue;  // empty clusters keep their center and are dropped later
      for (std::size_t k = 0; k < d; ++k)
        centers[c * d + k] = sums[c * d + k] / static_cast<double>(counts[c]);
    }
    if (assign == previous) break;
    previous = assign;
  }

  std::vector<std::size_t> remap(n_c, n_c);
  for (std::size_t c = 0; c < n_c; ++c) {
    if (counts[c] == 0) continue;
    remap[c] = result.clusters.size();
    Cluster cl;
    cl.id = result.clusters.size();
    cl.center.assign(centers.begin() + c * d, centers.begin() + (c + 1) * d);
    result.clusters.push_back(std::move(cl));
  }
  result.assignment.resize(n);
  std::vector<long long> target_sum(result.clusters.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t id = remap[assign[i]];
    result.assignment[i] = id;
    result.clusters[id].members.push_back(i);
    target_sum[id] += ds.target(i);
  }
  for (auto& cl : result.clusters)
    cl.tc = static_cast<double>(target_sum[cl.id]) / static_cast<double>(cl.size());
  return result;
}

double nominal_vc(const Dataset& ds, std::size_t n_c) {
  if (n_c < 1) throw Error("n_c must be at least 1");
  return static_cast<double>(ds.size()) / static_cast<double>(n_c);
}

}  // namespace gheur
