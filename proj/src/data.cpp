#include "gheur/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

namespace gheur {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Ordering used for label remapping: numeric when both parse, else lexicographic.
bool label_less(const std::string& a, const std::string& b) {
  double x = 0, y = 0;
  if (parse_double(a, x) && parse_double(b, y)) return x < y;
  return a < b;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void Dataset::add(std::span<const double> features, int target) {
  if (targets_.empty() && values_.empty() && dim_ == 0) dim_ = features.size();
  if (features.size() != dim_) throw Error("feature length does not match dataset dimension");
  if (target != -1 && target != 1) throw Error("target must be -1 or +1");
  values_.insert(values_.end(), features.begin(), features.end());
  targets_.push_back(target);
}

void Dataset::reserve(std::size_t n) {
  values_.reserve(n * dim_);
  targets_.reserve(n);
}

LabeledPoint Dataset::point(std::size_t i) const {
  auto f = features(i);
  return {std::vector<double>(f.begin(), f.end()), targets_[i]};
}

Dataset Dataset::subset(std::span<const std::size_t> ids) const {
  Dataset out(dim_);
  out.reserve(ids.size());
  for (auto id : ids) out.add(features(id), targets_[id]);
  return out;
}

std::array<std::size_t, 2> Dataset::class_counts() const {
  std::array<std::size_t, 2> c{0, 0};
  for (int t : targets_) ++c[t > 0 ? 1 : 0];
  return c;
}

Dataset load_csv(const std::filesystem::path& path, int label_column) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::size_t arity = 0;
  std::size_t row_no = 0;
  std::size_t label_idx = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    auto fields = split_fields(view, ',');
    if (first) {
      arity = fields.size();
      if (arity < 2) throw ParseError("row " + std::to_string(row_no) + ": need at least 2 columns");
      if (label_column < 0) {
        label_idx = arity - 1;
      } else {
        label_idx = static_cast<std::size_t>(label_column);
        if (label_idx >= arity) throw ParseError("label column out of range");
      }
    } else if (fields.size() != arity) {
      throw ParseError("parse error at row " + std::to_string(row_no) + ": expected " +
                       std::to_string(arity) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> feats;
    feats.reserve(arity - 1);
    bool numeric = true;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_idx) continue;
      double v = 0;
      if (!parse_double(fields[c], v)) {
        numeric = false;
        break;
      }
      feats.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw ParseError("parse error at row " + std::to_string(row_no) + ": non-numeric feature");
    }
    first = false;
    rows.push_back(std::move(feats));
    labels.emplace_back(fields[label_idx]);
  }
  if (rows.empty()) throw ParseError("no points");

  std::vector<std::string> distinct = labels;
  std::sort(distinct.begin(), distinct.end(), label_less);
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](const auto& a, const auto& b) {
                               return !label_less(a, b) && !label_less(b, a);
                             }),
                 distinct.end());
  if (distinct.size() > 2)
    throw UnsupportedError("unsupported: " + std::to_string(distinct.size()) +
                           " distinct labels, only two classes are supported");
  std::map<std::string, int, decltype(&label_less)> remap(&label_less);
  if (distinct.size() == 2) {
    remap[distinct[0]] = -1;
    remap[distinct[1]] = 1;
  } else {
    double v = 0;
    remap[distinct[0]] = (parse_double(distinct[0], v) && v > 0) ? 1 : -1;
  }

  Dataset ds(arity - 1);
  ds.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ds.add(rows[i], remap.at(labels[i]));
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    line.clear();
    for (double v : ds.features(i)) {
      line += format_double(v);
      line += ',';
    }
    line += ds.target(i) > 0 ? "1" : "-1";
    line += '\n';
    out << line;
  }
}

Dataset parse_libsvm_text(const std::string& text) {
  struct Row {
    std::vector<std::pair<std::size_t, double>> entries;
    int target;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::istringstream tokens{std::string(view)};
    std::string tok;
    tokens >> tok;
    double label = 0;
    if (!parse_double(tok, label))
      throw ParseError("parse error at line " + std::to_string(row_no) + ": bad label");
    Row row{{}, label > 0 ? 1 : -1};
    std::size_t last = 0;
    while (tokens >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("parse error at line " + std::to_string(row_no) + ": expected idx:val");
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      double val = 0;
      if (ec != std::errc() || p != tok.data() + colon || idx == 0 ||
          !parse_double(std::string_view(tok).substr(colon + 1), val))
        throw ParseError("parse error at line " + std::to_string(row_no) + ": bad entry '" + tok +
                         "'");
      if (idx <= last)
        throw ParseError("parse error at line " + std::to_string(row_no) +
                         ": indices must be strictly increasing");
      last = idx;
      max_index = std::max(max_index, idx);
      row.entries.emplace_back(idx, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no points");
  Dataset ds(max_index);
  ds.reserve(rows.size());
  std::vector<double> dense(max_index);
  for (const auto& r : rows) {
    std::fill(dense.begin(), dense.end(), 0.0);
    for (auto [idx, v] : r.entries) dense[idx - 1] = v;
    ds.add(dense, r.target);
  }
  return ds;
}

Dataset load_libsvm_format(const std::filesystem::path& path) {
  return parse_libsvm_text(read_file(path));
}

void save_libsvm_format(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t d = ds.dim();
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    line = ds.target(i) > 0 ? "+1" : "-1";
    auto f = ds.features(i);
    for (std::size_t j = 0; j < d; ++j) {
      // The last index is always written so the dimension survives a reload.
      if (f[j] == 0.0 && j + 1 != d) continue;
      line += ' ';
      line += std::to_string(j + 1);
      line += ':';
      line += format_double(f[j]);
    }
    line += '\n';
    out << line;
  }
}

Dataset scale_minmax(const Dataset& ds) {
  const std::size_t d = ds.dim();
  std::vector<double> lo(d, 0.0), hi(d, 0.0);
  for (std::size_t j = 0; j < d && ds.size() > 0; ++j) lo[j] = hi[j] = ds.features(0)[j];
  for (std::size_t i = 1; i < ds.size(); ++i) {
    auto f = ds.features(i);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], f[j]);
      hi[j] = std::max(hi[j], f[j]);
    }
  }
  Dataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto f = out.features(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double range = hi[j] - lo[j];
      f[j] = range > 0.0 ? (f[j] - lo[j]) / range : 0.0;
    }
  }
  return out;
}

Dataset gen_dataset_one(std::size_t n, std::size_t d, double margin, std::uint64_t seed,
                        const GeneratorNoise& noise) {
  if (n < 2 || d < 2) throw Error("dataset one needs n >= 2 and d >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset ds(d);
  ds.reserve(n);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = unit(rng);
    int label = x[0] >= 0.5 ? 1 : -1;
    const double u = unit(rng);
    if (std::abs(x[0] - 0.5) < margin / 2.0 && u < noise.flip_probability) label = -label;
    ds.add(x, label);
  }
  return ds;
}

int sphere_label(std::span<const double> x, double radius) {
  double r2 = 0;
  for (double v : x) r2 += (v - 0.5) * (v - 0.5);
  return r2 < radius * radius ? 1 : -1;
}

Dataset gen_dataset_two(std::size_t n, std::size_t d, double radius, std::uint64_t seed,
                        const GeneratorNoise& noise) {
  if (n < 2 || d < 2) throw Error("dataset two needs n >= 2 and d >= 2");
  if (!(radius > 0.0 && radius < 0.5)) throw Error("dataset two needs 0 < radius < 0.5");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset ds(d);
  ds.reserve(n);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = unit(rng);
    int label = sphere_label(x, radius);
    double r2 = 0;
    for (double v : x) r2 += (v - 0.5) * (v - 0.5);
    const double u = unit(rng);
    if (std::abs(std::sqrt(r2) - radius) < noise.shell_width / 2.0 && u < noise.flip_probability)
      label = -label;
    ds.add(x, label);
  }
  return ds;
}

std::vector<std::size_t> split_train_ids(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error("train_fraction must be in (0,1)");
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  std::mt19937_64 rng(spec.seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
  ids.resize(n_train);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  auto train_ids = split_train_ids(ds.size(), spec);
  std::vector<std::size_t> test_ids;
  test_ids.reserve(ds.size() - train_ids.size());
  std::size_t t = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (t < train_ids.size() && train_ids[t] == i) {
      ++t;
      continue;
    }
    test_ids.push_back(i);
  }
  return {ds.subset(train_ids), ds.subset(test_ids)};
}

}  // namespace gheur
