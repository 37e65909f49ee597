#pragma once

#include <array>
#include <vector>

#include <nlohmann/json.hpp>

#include "gheur/clubbing.hpp"
#include "gheur/clustering.hpp"
#include "gheur/knitting.hpp"
#include "gheur/shedding.hpp"
#include "gheur/svm.hpp"

namespace gheur {

struct StageTimings {
  double cluster_ms = 0.0;
  double knit_ms = 0.0;
  double shed_ms = 0.0;
  double club_ms = 0.0;
  double train_ms = 0.0;

  double heuristic_ms() const { return cluster_ms + knit_ms + shed_ms + club_ms; }
  double total_ms() const { return heuristic_ms() + train_ms; }
};

struct ReductionReport {
  std::size_t original_size = 0;
  std::size_t reduced_size = 0;
  std::size_t n_clusters = 0;
  std::size_t relevant_clusters = 0;
  std::array<std::size_t, 2> counts_before{0, 0};
  std::array<std::size_t, 2> counts_after{0, 0};
  double sd_before = 0.0;
  double sd_after = 0.0;
  std::vector<std::size_t> partition_sizes;
  std::vector<double> partition_train_ms;
  std::size_t constant_partitions = 0;  // single-class partitions given a constant predictor
  std::vector<double> cost_history;
  std::size_t coarsen_iterations = 0;
  StageTimings timings;

  nlohmann::json to_json() const;
};

// Output of cluster -> knit -> shed.
struct Reduction {
  ClusteringResult clustering;
  PatternGraph graph;
  RelevantSet relevant;
  StageTimings timings;
};

// Throws when no cluster survives the shedding cut.
Reduction reduce(const Dataset& ds, const HeuristicParams& params, Exec exec = Exec::parallel);

// One model per partition, in partition order.
struct EnsembleModel {
  std::vector<TrainedModel> models;

  std::size_t size() const { return models.size(); }
  bool operator==(const EnsembleModel&) const = default;
};

TrainedModel train_full(const Dataset& ds, const ClassifierSpec& spec, double* train_ms = nullptr);

struct GshResult {
  TrainedModel model;
  ReductionReport report;
  Reduction reduction;
};

GshResult train_gsh(const Dataset& ds, const HeuristicParams& params, const ClassifierSpec& spec);

struct GchResult {
  EnsembleModel ensemble;
  ReductionReport report;
  Reduction reduction;
  ClubResult club;
};

GchResult train_gch_serial(const Dataset& ds, const HeuristicParams& params,
                           const ClassifierSpec& spec);

// Partitioning without training: cluster, knit, shed and club.
struct Clubbed {
  Reduction reduction;
  ClubResult club;
};

Clubbed reduce_and_club(const Dataset& ds, const HeuristicParams& params, Exec exec = Exec::parallel);

// Trains every partition in order on ds.subset(point_ids).
EnsembleModel train_partitions(const Dataset& ds, const PartitionSet& parts, const ClassifierSpec& spec,
                               std::vector<double>* per_partition_ms = nullptr,
                               std::size_t* constant_count = nullptr);

// Quadratic cost proxy: sum of squared part sizes.
double quadratic_cost(const std::vector<std::size_t>& sizes);

}  // namespace gheur
