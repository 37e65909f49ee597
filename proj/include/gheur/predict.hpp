#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "gheur/ann.hpp"
#include "gheur/clubbing.hpp"
#include "gheur/pipeline.hpp"

namespace gheur {

// A relevant cluster center tagged with the partition that owns it.
struct RouterEntry {
  std::size_t cluster_id = 0;
  std::size_t partition = 0;
  std::vector<double> center;
};

// Nearest hypothesis search: a test point goes to the partition of the
// nearest relevant cluster center.
class Router {
 public:
  Router(std::vector<RouterEntry> entries, SearchMode mode);

  std::size_t dim() const { return dim_; }
  std::size_t partition_count() const { return partition_count_; }
  const std::vector<RouterEntry>& entries() const { return entries_; }

  std::size_t route(std::span<const double> x) const;
  std::vector<std::size_t> route(const Dataset& test, Exec exec = Exec::parallel) const;

 private:
  std::vector<RouterEntry> entries_;  // ascending cluster id
  std::size_t dim_ = 0;
  std::size_t partition_count_ = 0;
  std::unique_ptr<NNIndex> index_;
};

Router build_router(const PartitionSet& parts, const ClusteringResult& clustering,
                    SearchMode mode = SearchMode::exact);

struct PartitionAccuracy {
  std::size_t partition = 0;
  std::size_t points = 0;
  std::size_t correct = 0;

  double accuracy() const { return points == 0 ? 0.0 : static_cast<double>(correct) / points; }
};

struct AccuracyReport {
  std::vector<PartitionAccuracy> per_partition;
  std::size_t total = 0;
  std::size_t correct = 0;
  double weighted_accuracy = 0.0;
  double route_ms = 0.0;
  double predict_ms = 0.0;

  double route_fraction() const {
    const double t = route_ms + predict_ms;
    return t > 0.0 ? route_ms / t : 0.0;
  }
  nlohmann::json to_json() const;
};

// Size-weighted mean of per-partition accuracies; empty partitions carry no weight.
double weighted_accuracy(const std::vector<PartitionAccuracy>& rows);

struct EnsemblePrediction {
  std::vector<int> labels;
  std::vector<std::size_t> routes;
  AccuracyReport report;
};

EnsemblePrediction ensemble_predict(const EnsembleModel& ensemble, const Router& router,
                                    const Dataset& test, Exec exec = Exec::parallel);

}  // namespace gheur
