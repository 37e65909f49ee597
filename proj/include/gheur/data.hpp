#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "gheur/common.hpp"

namespace gheur {

struct LabeledPoint {
  std::vector<double> features;
  int target = 1;  // -1 or +1

  bool operator==(const LabeledPoint&) const = default;
};

// Row-major labeled dataset. Targets are always -1 or +1.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> features, int target);
  void add(const LabeledPoint& p) { add(p.features, p.target); }
  void reserve(std::size_t n);

  std::size_t size() const { return targets_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return targets_.empty(); }

  std::span<const double> features(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> features(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  int target(std::size_t i) const { return targets_[i]; }
  LabeledPoint point(std::size_t i) const;

  std::span<const double> values() const { return values_; }
  std::span<const int> targets() const { return targets_; }

  // Rows selected by id, in the order given.
  Dataset subset(std::span<const std::size_t> ids) const;

  // {count of -1, count of +1}
  std::array<std::size_t, 2> class_counts() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<int> targets_;
};

struct SplitSpec {
  double train_fraction = 0.25;
  std::uint64_t seed = 0;
};

// label_column < 0 selects the last column.
Dataset load_csv(const std::filesystem::path& path, int label_column = -1);
void save_csv(const Dataset& ds, const std::filesystem::path& path);

Dataset load_libsvm_format(const std::filesystem::path& path);
void save_libsvm_format(const Dataset& ds, const std::filesystem::path& path);

// Parses LIBSVM sparse text from memory; used by the file loader.
Dataset parse_libsvm_text(const std::string& text);

Dataset scale_minmax(const Dataset& ds);

struct GeneratorNoise {
  double flip_probability = 0.1;
  // Width of the shell around the sphere of Dataset II where labels are noisy.
  double shell_width = 0.02;
};

// Uniform points in [0,1]^d labelled by the side of x_0 = 0.5; labels inside a
// band of width `margin` around the plane flip with the noise probability.
Dataset gen_dataset_one(std::size_t n, std::size_t d, double margin, std::uint64_t seed,
                        const GeneratorNoise& noise = {});

// +1 inside the sphere of `radius` around the cube centroid, -1 outside.
Dataset gen_dataset_two(std::size_t n, std::size_t d, double radius, std::uint64_t seed,
                        const GeneratorNoise& noise = {});

// Noise-free label rule of Dataset II.
int sphere_label(std::span<const double> x, double radius);

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

// Indices of the training half of split(); the test half is the complement.
std::vector<std::size_t> split_train_ids(std::size_t n, const SplitSpec& spec);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace gheur
