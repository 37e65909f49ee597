#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "gheur/data.hpp"
#include "gheur/svm.hpp"
#include "test_support.hpp"

using namespace gheur;
using gheur::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

}  // namespace

TEST(LoadCsv, RemapsTwoLabelsBySortOrder) {
  TempDir dir;
  write_text(dir / "a.csv", "0,0,A\n1,1,B\n2,2,A\n");
  const Dataset ds = load_csv(dir / "a.csv");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_EQ(ds.target(0), -1);
  EXPECT_EQ(ds.target(1), 1);
  EXPECT_EQ(ds.target(2), -1);
  EXPECT_EQ(ds.features(2)[1], 2.0);
}

TEST(LoadCsv, NumericLabelsSortNumerically) {
  TempDir dir;
  write_text(dir / "a.csv", "0,10\n1,9\n");
  const Dataset ds = load_csv(dir / "a.csv");
  EXPECT_EQ(ds.target(0), 1);
  EXPECT_EQ(ds.target(1), -1);
}

TEST(LoadCsv, RaggedRowReportsRowNumber) {
  TempDir dir;
  write_text(dir / "a.csv", "1,2\n1,2,3\n");
  try {
    load_csv(dir / "a.csv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, ThreeLabelsAreUnsupported) {
  TempDir dir;
  write_text(dir / "a.csv", "0,a\n1,b\n2,c\n");
  EXPECT_THROW(load_csv(dir / "a.csv"), UnsupportedError);
}

TEST(LoadCsv, HeaderRowIsSkipped) {
  TempDir dir;
  write_text(dir / "a.csv", "x,y,label\n0.5,0.25,1\n0.1,0.2,0\n");
  const Dataset ds = load_csv(dir / "a.csv");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.target(0), 1);
  EXPECT_EQ(ds.target(1), -1);
}

TEST(LoadCsv, ExplicitLabelColumn) {
  TempDir dir;
  write_text(dir / "a.csv", "1,3.5,7\n-1,4.5,8\n");
  const Dataset ds = load_csv(dir / "a.csv", 0);
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_EQ(ds.features(1)[0], 4.5);
  EXPECT_EQ(ds.target(1), -1);
}

TEST(LoadCsv, SkinSegmentationShape) {
  // Four numeric columns plus a label over 245057 rows.
  TempDir dir;
  {
    std::ofstream out(dir / "skin.csv");
    std::mt19937 rng(3);
    for (int i = 0; i < 245057; ++i)
      out << rng() % 256 << ',' << rng() % 256 << ',' << rng() % 256 << ',' << rng() % 256 << ','
          << (1 + rng() % 2) << '\n';
  }
  const Dataset ds = load_csv(dir / "skin.csv");
  EXPECT_EQ(ds.size(), 245057u);
  EXPECT_EQ(ds.dim(), 4u);
}

TEST(LoadLibsvm, DenseExpansion) {
  const Dataset ds = parse_libsvm_text("+1 1:0.5 3:1.0\n");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.dim(), 3u);
  EXPECT_EQ(ds.point(0), (LabeledPoint{{0.5, 0.0, 1.0}, 1}));
}

TEST(LoadLibsvm, SingleEntry) {
  const Dataset ds = parse_libsvm_text("-1 2:2.0\n");
  EXPECT_EQ(ds.point(0), (LabeledPoint{{0.0, 2.0}, -1}));
}

TEST(LoadLibsvm, EmptyInputHasNoPoints) {
  try {
    parse_libsvm_text("");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no points"), std::string::npos);
  }
}

TEST(LoadLibsvm, NonMonotoneIndicesRejected) {
  EXPECT_THROW(parse_libsvm_text("+1 3:1 2:1\n"), ParseError);
  EXPECT_THROW(parse_libsvm_text("+1 2:1 2:1\n"), ParseError);
}

TEST(DataRoundTrip, CsvAndLibsvmAreBitIdentical) {
  TempDir dir;
  Dataset ds = gen_dataset_one(500, 3, 0.05, 11);
  // Values that stress shortest round-trip printing.
  ds.features(0)[0] = 0.1 + 0.2;
  ds.features(1)[1] = 1e-300;
  ds.features(2)[2] = 0.0;
  save_csv(ds, dir / "a.csv");
  save_libsvm_format(ds, dir / "a.svm");
  EXPECT_EQ(load_csv(dir / "a.csv"), ds);
  EXPECT_EQ(load_libsvm_format(dir / "a.svm"), ds);

  save_csv(load_csv(dir / "a.csv"), dir / "b.csv");
  EXPECT_EQ(load_csv(dir / "b.csv"), ds);
}

TEST(ScaleMinmax, AffineMapAndDegenerateColumns) {
  Dataset ds(2);
  ds.add(std::vector<double>{2, 5}, 1);
  ds.add(std::vector<double>{4, 5}, -1);
  ds.add(std::vector<double>{6, 5}, 1);
  const Dataset s = scale_minmax(ds);
  EXPECT_EQ(s.features(0)[0], 0.0);
  EXPECT_EQ(s.features(1)[0], 0.5);
  EXPECT_EQ(s.features(2)[0], 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.features(i)[1], 0.0);
  EXPECT_EQ(std::vector<int>(s.targets().begin(), s.targets().end()), (std::vector<int>{1, -1, 1}));
}

TEST(ScaleMinmax, ColumnsScaledIndependently) {
  Dataset ds(2);
  ds.add(std::vector<double>{0, 10}, 1);
  ds.add(std::vector<double>{1, 20}, -1);
  const Dataset s = scale_minmax(ds);
  EXPECT_EQ(s.point(0).features, (std::vector<double>{0, 0}));
  EXPECT_EQ(s.point(1).features, (std::vector<double>{1, 1}));
}

TEST(ScaleMinmax, IdempotentProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 50.0);
    Dataset ds(3);
    for (int i = 0; i < 40; ++i) ds.add(std::vector<double>{g(rng), g(rng), 7.0}, (i % 2) ? 1 : -1);
    const Dataset once = scale_minmax(ds);
    const Dataset twice = scale_minmax(once);
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(once.features(i)[j], twice.features(i)[j], 1e-12);
  }
}

TEST(GenDatasetOne, DeterministicAndInUnitCube) {
  const Dataset a = gen_dataset_one(2000, 3, 0.02, 5);
  const Dataset b = gen_dataset_one(2000, 3, 0.02, 5);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, gen_dataset_one(2000, 3, 0.02, 6));
  for (double v : a.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(GenDatasetOne, LabelsFollowHyperplaneOutsideBand) {
  const double margin = 0.1;
  const Dataset ds = gen_dataset_one(20000, 2, margin, 9);
  std::size_t in_band = 0, flipped = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double x0 = ds.features(i)[0];
    const int clean = x0 >= 0.5 ? 1 : -1;
    if (std::abs(x0 - 0.5) < margin / 2) {
      ++in_band;
      flipped += ds.target(i) != clean;
    } else {
      EXPECT_EQ(ds.target(i), clean);
    }
  }
  const double rate = static_cast<double>(flipped) / static_cast<double>(in_band);
  EXPECT_NEAR(rate, 0.1, 0.03);
}

TEST(GenDatasetOne, ZeroMarginIsLinearlySeparable) {
  const Dataset ds = gen_dataset_one(400, 2, 0.0, 3);
  ClassifierSpec spec;
  spec.kernel.kind = KernelKind::linear;
  spec.C = 1e4;
  const TrainedModel m = train(ds, spec);
  EXPECT_EQ(accuracy(predict(m, ds), ds.targets()), 1.0);
}

TEST(GenDatasetOne, TableOneScale) {
  const Dataset ds = gen_dataset_one(30000, 2, 0.02, 1);
  EXPECT_EQ(ds.size(), 30000u);
  EXPECT_EQ(ds.dim(), 2u);
}

TEST(GenDatasetTwo, SphereRule) {
  const std::vector<double> centroid{0.5, 0.5, 0.5};
  const std::vector<double> corner{0.0, 0.0, 0.0};
  EXPECT_EQ(sphere_label(centroid, 0.2), 1);
  EXPECT_EQ(sphere_label(corner, 0.2), -1);
  const Dataset ds = gen_dataset_two(5000, 3, 0.2, 4);
  EXPECT_EQ(ds.dim(), 3u);
  const auto counts = ds.class_counts();
  EXPECT_GT(counts[0], 0u);
  EXPECT_GT(counts[1], 0u);
  std::size_t disagree = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) disagree += ds.target(i) != sphere_label(ds.features(i), 0.2);
  // Only shell points can disagree with the clean rule.
  EXPECT_LT(disagree, ds.size() / 50);
  EXPECT_THROW(gen_dataset_two(10, 3, 0.6, 1), Error);
}

TEST(Split, SmallExample) {
  Dataset ds(1);
  for (int i = 0; i < 4; ++i) ds.add(std::vector<double>{static_cast<double>(i)}, 1);
  auto [train, test] = split(ds, {0.5, 1});
  EXPECT_EQ(train.size(), 2u);
  EXPECT_EQ(test.size(), 2u);
  std::set<double> seen;
  for (std::size_t i = 0; i < 2; ++i) {
    seen.insert(train.features(i)[0]);
    seen.insert(test.features(i)[0]);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Split, PaperRatio) {
  const auto ids = split_train_ids(120000, {0.25, 3});
  EXPECT_NEAR(static_cast<double>(ids.size()), 30000.0, 1.0);
}

TEST(Split, DisjointExhaustiveProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 300;
    const double frac = 0.05 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng);
    const SplitSpec spec{frac, rng()};
    Dataset ds(1);
    for (std::size_t i = 0; i < n; ++i) ds.add(std::vector<double>{static_cast<double>(i)}, (i & 1) ? 1 : -1);
    auto [a, b] = split(ds, spec);
    ASSERT_EQ(a.size() + b.size(), n);
    EXPECT_LE(std::abs(static_cast<double>(a.size()) - frac * static_cast<double>(n)), 1.0);
    std::vector<double> all;
    for (std::size_t i = 0; i < a.size(); ++i) all.push_back(a.features(i)[0]);
    for (std::size_t i = 0; i < b.size(); ++i) all.push_back(b.features(i)[0]);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(all[i], static_cast<double>(i));
    auto [a2, b2] = split(ds, spec);
    EXPECT_EQ(a, a2);
    EXPECT_EQ(b, b2);
  }
}

TEST(Dataset, RejectsBadTargetsAndDimensions) {
  Dataset ds(2);
  EXPECT_THROW(ds.add(std::vector<double>{1, 2}, 0), Error);
  EXPECT_THROW(ds.add(std::vector<double>{1}, 1), Error);
}
