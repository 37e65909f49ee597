#pragma once

// Line-delimited JSON artifacts passed between CLI stages. Every file starts
// with a {"type":"config",...} record holding the effective configuration.
// Doubles are written in shortest round-trip form so that a pipeline composed
// from files reproduces the in-process one exactly.

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "gheur/clubbing.hpp"
#include "gheur/clustering.hpp"
#include "gheur/knitting.hpp"
#include "gheur/predict.hpp"
#include "gheur/shedding.hpp"

namespace gheur {

using Json = nlohmann::json;

struct JsonlFile {
  Json config;                // empty object when the file has none
  std::vector<Json> records;  // every non-config line
};

JsonlFile read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const Json& config, const std::vector<Json>& records);

void write_clustering(const std::filesystem::path& path, const ClusteringResult& c, const Json& config);
ClusteringResult read_clustering(const std::filesystem::path& path);

void write_graph(const std::filesystem::path& path, const PatternGraph& g, const Json& config);
PatternGraph read_graph(const std::filesystem::path& path);

void write_relevant(const std::filesystem::path& path, const RelevantSet& r, const Json& config);
RelevantSet read_relevant(const std::filesystem::path& path);

// Partitions together with the centers of their clusters, which is all the
// router needs at test time.
void write_partitions(const std::filesystem::path& path, const PartitionSet& parts,
                      const ClusteringResult& clustering, const Json& config);

struct PartitionFile {
  PartitionSet parts;
  std::vector<RouterEntry> router_entries;
};
PartitionFile read_partitions(const std::filesystem::path& path);

// Per-iteration coarsening trace as CSV with a config sidecar.
void write_cost_csv(const std::filesystem::path& path, const ClubResult& r, const Json& config);

// Writes <path>.config.json next to a non-JSONL artifact.
void write_config_sidecar(const std::filesystem::path& path, const Json& config);

}  // namespace gheur
