#include "gheur/predict.hpp"

#include <algorithm>
#include <set>

namespace gheur {

Router::Router(std::vector<RouterEntry> entries, SearchMode mode) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error("router needs at least one partition");
  std::sort(entries_.begin(), entries_.end(),
            [](const RouterEntry& a, const RouterEntry& b) { return a.cluster_id < b.cluster_id; });
  dim_ = entries_.front().center.size();
  std::vector<double> flat;
  flat.reserve(entries_.size() * dim_);
  std::set<std::size_t> parts;
  for (const auto& e : entries_) {
    if (e.center.size() != dim_) throw Error("router centers differ in dimension");
    flat.insert(flat.end(), e.center.begin(), e.center.end());
    parts.insert(e.partition);
  }
  partition_count_ = parts.size();
  AnnOptions opt;
  opt.mode = mode;
  index_ = std::make_unique<NNIndex>(flat, dim_, opt);
}

std::size_t Router::route(std::span<const double> x) const {
  if (x.size() != dim_) throw Error("route: dimension mismatch");
  return entries_[index_->query(x, 1).front().index].partition;
}

std::vector<std::size_t> Router::route(const Dataset& test, Exec exec) const {
  if (test.dim() != dim_) throw Error("route: dimension mismatch");
  const KnnResult r = index_->knn_search(test.values(), 1, exec);
  std::vector<std::size_t> out(test.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = entries_[r.indices[i]].partition;
  return out;
}

Router build_router(const PartitionSet& parts, const ClusteringResult& clustering, SearchMode mode) {
  if (parts.partitions.empty()) throw Error("empty partition set");
  std::vector<RouterEntry> entries;
  for (const auto& p : parts.partitions)
    for (auto c : p.cluster_ids) entries.push_back({c, p.id, clustering.clusters.at(c).center});
  return Router(std::move(entries), mode);
}

nlohmann::json AccuracyReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : per_partition)
    rows.push_back({{"partition", r.partition},
                    {"points", r.points},
                    {"correct", r.correct},
                    {"accuracy", r.accuracy()}});
  return {{"per_partition", rows},
          {"total", total},
          {"correct", correct},
          {"weighted_accuracy", weighted_accuracy},
          {"route_ms", route_ms},
          {"predict_ms", predict_ms},
          {"route_fraction", route_fraction()}};
}

double weighted_accuracy(const std::vector<PartitionAccuracy>& rows) {
  double num = 0.0, den = 0.0;
  for (const auto& r : rows) {
    num += r.accuracy() * static_cast<double>(r.points);
    den += static_cast<double>(r.points);
  }
  return den > 0.0 ? num / den : 0.0;
}

EnsemblePrediction ensemble_predict(const EnsembleModel& ensemble, const Router& router,
                                    const Dataset& test, Exec exec) {
  EnsemblePrediction out;
  Stopwatch sw;
  out.routes = router.route(test, exec);
  out.report.route_ms = sw.elapsed_ms();

  sw.reset();
  std::vector<std::vector<std::size_t>> groups(ensemble.size());
  for (std::size_t i = 0; i < out.routes.size(); ++i) {
    if (out.routes[i] >= ensemble.size())
      throw Error("router partition " + std::to_string(out.routes[i]) + " has no model");
    groups[out.routes[i]].push_back(i);
  }
  out.labels.assign(test.size(), 1);
  out.report.per_partition.resize(ensemble.size());
  for (std::size_t p = 0; p < ensemble.size(); ++p) {
    auto& row = out.report.per_partition[p];
    row.partition = p;
    row.points = groups[p].size();
    if (groups[p].empty()) continue;
    const Dataset sub = test.subset(groups[p]);
    const auto labels = predict(ensemble.models[p], sub, exec);
    for (std::size_t t = 0; t < labels.size(); ++t) {
      out.labels[groups[p][t]] = labels[t];
      row.correct += labels[t] == sub.target(t);
    }
  }
  out.report.predict_ms = sw.elapsed_ms();

  out.report.total = test.size();
  for (const auto& r : out.report.per_partition) out.report.correct += r.correct;
  out.report.weighted_accuracy = weighted_accuracy(out.report.per_partition);
  return out;
}

}  // namespace gheur
