#include "gheur/pipeline.hpp"

#include <sstream>

namespace gheur {

nlohmann::json ReductionReport::to_json() const {
  nlohmann::json j;
  j["original_size"] = original_size;
  j["reduced_size"] = reduced_size;
  j["n_clusters"] = n_clusters;
  j["relevant_clusters"] = relevant_clusters;
  j["counts_before"] = counts_before;
  j["counts_after"] = counts_after;
  j["imbalance_sd_before"] = sd_before;
  j["imbalance_sd_after"] = sd_after;
  j["partition_sizes"] = partition_sizes;
  j["partition_train_ms"] = partition_train_ms;
  j["constant_partitions"] = constant_partitions;
  j["cost_history"] = cost_history;
  j["coarsen_iterations"] = coarsen_iterations;
  j["timings_ms"] = {{"cluster", timings.cluster_ms}, {"knit", timings.knit_ms},
                     {"shed", timings.shed_ms},       {"club", timings.club_ms},
                     {"train", timings.train_ms},     {"heuristic", timings.heuristic_ms()},
                     {"total", timings.total_ms()}};
  return j;
}

Reduction reduce(const Dataset& ds, const HeuristicParams& params, Exec exec) {
  params.validate();
  if (ds.empty()) throw Error("empty dataset");
  Reduction r;
  Stopwatch sw;
  r.clustering = cluster(ds, params.clusters_for(ds.size()), params.cluster_iters, params.seed, exec);
  r.timings.cluster_ms = sw.elapsed_ms();

  sw.reset();
  r.graph = knit(r.clustering.clusters, params);
  r.timings.knit_ms = sw.elapsed_ms();

  sw.reset();
  r.relevant = relevant_set(r.graph, r.clustering, params.gs_edge_cut);
  r.timings.shed_ms = sw.elapsed_ms();
  if (r.relevant.degenerate()) {
    std::ostringstream os;
    os << "empty reduced set: no cluster has an edge of weight >= " << params.gs_edge_cut
       << "; lower gs_edge_cut";
    throw Error(os.str());
  }
  return r;
}

namespace {

ReductionReport base_report(const Dataset& ds, const Reduction& r) {
  ReductionReport rep;
  rep.original_size = ds.size();
  rep.reduced_size = r.relevant.point_ids.size();
  rep.n_clusters = r.clustering.clusters.size();
  rep.relevant_clusters = r.relevant.cluster_ids.size();
  rep.counts_before = ds.class_counts();
  rep.counts_after = r.relevant.per_class_counts;
  rep.sd_before = imbalance_sd(rep.counts_before);
  rep.sd_after = imbalance_sd(rep.counts_after);
  rep.timings = r.timings;
  return rep;
}

}  // namespace

TrainedModel train_full(const Dataset& ds, const ClassifierSpec& spec, double* train_ms) {
  Stopwatch sw;
  TrainedModel m = train(ds, spec);
  if (train_ms) *train_ms = sw.elapsed_ms();
  return m;
}

GshResult train_gsh(const Dataset& ds, const HeuristicParams& params, const ClassifierSpec& spec) {
  GshResult out;
  out.reduction = reduce(ds, params);
  out.report = base_report(ds, out.reduction);
  const Dataset reduced = ds.subset(out.reduction.relevant.point_ids);
  Stopwatch sw;
  out.model = train(reduced, spec);
  out.report.timings.train_ms = sw.elapsed_ms();
  out.report.partition_sizes = {reduced.size()};
  return out;
}

Clubbed reduce_and_club(const Dataset& ds, const HeuristicParams& params, Exec exec) {
  Clubbed c;
  c.reduction = reduce(ds, params, exec);
  Stopwatch sw;
  const PatternGraph view = restrict_to(c.reduction.graph, c.reduction.relevant.cluster_ids);
  c.club = club(view, c.reduction.clustering, params);
  c.reduction.timings.club_ms = sw.elapsed_ms();
  return c;
}

EnsembleModel train_partitions(const Dataset& ds, const PartitionSet& parts, const ClassifierSpec& spec,
                               std::vector<double>* per_partition_ms, std::size_t* constant_count) {
  EnsembleModel e;
  if (per_partition_ms) per_partition_ms->clear();
  if (constant_count) *constant_count = 0;
  for (const auto& p : parts.partitions) {
    const Dataset sub = ds.subset(p.point_ids);
    Stopwatch sw;
    e.models.push_back(train_or_constant(sub, spec));
    if (per_partition_ms) per_partition_ms->push_back(sw.elapsed_ms());
    if (constant_count && e.models.back().is_constant()) ++*constant_count;
  }
  return e;
}

GchResult train_gch_serial(const Dataset& ds, const HeuristicParams& params,
                           const ClassifierSpec& spec) {
  GchResult out;
  Clubbed c = reduce_and_club(ds, params);
  out.reduction = std::move(c.reduction);
  out.club = std::move(c.club);
  out.report = base_report(ds, out.reduction);
  out.report.cost_history = out.club.cost_history;
  out.report.coarsen_iterations = out.club.iterations_run;
  for (const auto& p : out.club.parts.partitions) out.report.partition_sizes.push_back(p.size());

  Stopwatch sw;
  out.ensemble = train_partitions(ds, out.club.parts, spec, &out.report.partition_train_ms,
                                  &out.report.constant_partitions);
  out.report.timings.train_ms = sw.elapsed_ms();
  return out;
}

double quadratic_cost(const std::vector<std::size_t>& sizes) {
  double s = 0.0;
  for (auto n : sizes) s += static_cast<double>(n) * static_cast<double>(n);
  return s;
}

}  // namespace gheur
