#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gheur/data.hpp"
#include "gheur/knitting.hpp"
#include "gheur/svm.hpp"

namespace gheur {

struct SweepSpec {
  std::string dataset = "one";                 // one | two
  std::vector<std::size_t> sizes{1000};        // training points per run
  std::vector<std::size_t> cluster_counts{0};  // 0 derives n_c from nominal_vc
  std::vector<std::string> pipelines{"full", "gsh", "gch_serial"};  // also gch_dist
  std::size_t test_size = 0;                   // 0 means equal to the training size
  std::size_t d = 2;
  double margin = 0.02;
  double radius = 0.2;
  GeneratorNoise noise;
  ClassifierSpec classifier;
  HeuristicParams heuristic;
  std::size_t repetitions = 5;
  std::size_t workers = 2;  // gch_dist only
  std::uint64_t seed = 1;

  void validate() const;
};

// One pipeline at one ladder point; timings are medians over repetitions.
struct BenchRow {
  std::string pipeline;
  std::string dataset;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t n_clusters = 0;
  std::size_t repetitions = 0;
  double cluster_ms = 0.0;
  double knit_ms = 0.0;
  double shed_ms = 0.0;
  double club_ms = 0.0;
  double train_ms = 0.0;
  double route_ms = 0.0;
  double predict_ms = 0.0;
  double total_ms = 0.0;
  double accuracy = 0.0;
  std::size_t partitions = 0;
  std::size_t reduced_size = 0;
  std::size_t messages_p1 = 0;
  std::size_t messages_p2 = 0;
  double p1_ms = 0.0;
  double p2_ms = 0.0;
  std::string error;

  double heuristic_ms() const { return cluster_ms + knit_ms + shed_ms + club_ms; }
  bool operator==(const BenchRow&) const = default;
};

std::vector<BenchRow> run_sweep(const SweepSpec& spec);

// Streams n_points random points to `workers` loopback receivers with each
// protocol and records message counts and median wall times.
BenchRow run_protocol_bench(std::size_t d, std::size_t n_points, std::size_t workers,
                            std::size_t repetitions = 3, std::uint64_t seed = 1);

std::string bench_csv_header();
std::string to_csv_line(const BenchRow& r);
BenchRow parse_csv_line(const std::string& line);
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);
std::vector<BenchRow> read_bench_csv(const std::filesystem::path& path);

nlohmann::json bench_summary(const std::vector<BenchRow>& rows);

double median(std::vector<double> v);

}  // namespace gheur
