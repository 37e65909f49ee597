// Acceptance checks. One PASS/FAIL line per criterion; every tolerance is a
// named constant below. `--only <id>` runs a single criterion.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gheur/bench.hpp"
#include "gheur/distnet/master.hpp"
#include "gheur/distnet/worker.hpp"
#include "gheur/pipeline.hpp"
#include "gheur/predict.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gheur;

namespace {

// Tolerances and bounds.
constexpr double kCrossWeightRelTol = 1e-9;
constexpr double kImbalanceFactor = 10.0;
constexpr double kFullAccuracyMin = 0.99;
constexpr double kGshAccuracyGap = 0.02;
constexpr double kGchAccuracyMin = 0.95;
constexpr std::size_t kPartitionsMin = 2, kPartitionsMax = 6;
constexpr double kKinkDropFactor = 5.0;
constexpr double kSpeedupMargin = 0.9;  // each faster stage takes at most 90% of the slower one
constexpr double kRouteFractionMax = 0.10;
constexpr double kWorkerSpeedupMin = 1.3;
constexpr double kKktTolFactor = 2.0;  // violation bound in units of the solver tolerance

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

HeuristicParams shed_params() {
  HeuristicParams p;
  p.ci_init = std::exp(1.0);
  p.ce_init = std::exp(4.0);
  p.gs_edge_cut = 3.01;
  p.gc_edge_cut = 3.20;
  return p;
}

// Serial clubbing constants (initial C_E = e^5, re-assessment e^1.5 and 1).
HeuristicParams case_one() {
  HeuristicParams p = shed_params();
  p.ce_init = std::exp(5.0);
  p.ci_reassess = std::exp(1.5);
  p.ce_reassess = 1.0;
  p.max_coarsen_iters = 10;
  return p;
}

ClassifierSpec linear_spec() {
  ClassifierSpec s;
  s.kernel.kind = KernelKind::linear;
  return s;
}

ClassifierSpec rbf_spec() {
  ClassifierSpec s;
  s.kernel.kind = KernelKind::rbf;
  return s;
}

// Shared by criteria 3, 4 and 8.
struct AccuracySetting {
  Dataset train{2}, test{2};
};

const AccuracySetting& accuracy_setting() {
  static const AccuracySetting s = [] {
    AccuracySetting a;
    a.train = gen_dataset_one(10000, 2, 0.02, 1);
    a.test = gen_dataset_one(30000, 2, 0.02, 2);
    return a;
  }();
  return s;
}

// Dataset I with an empty band of width `gap` around the separating
// hyperplane, so every cluster is pure and cross edges join pure clusters.
Dataset gapped_dataset_one(std::size_t n, double gap, std::uint64_t seed) {
  const Dataset src = gen_dataset_one(n, 2, 0.0, seed);
  Dataset ds(2);
  for (std::size_t i = 0; i < src.size(); ++i)
    if (std::abs(src.features(i)[0] - 0.5) >= gap / 2) ds.add(src.features(i), src.target(i));
  return ds;
}

// Positives for x_0 < 1/7 (about 1:6), labels flipped with probability 0.1
// within 0.01 of the boundary.
Dataset slab_dataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double b = 1.0 / 7.0;
  Dataset ds(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    int c = x < b ? 1 : -1;
    if (std::abs(x - b) < 0.01 && u(rng) < 0.1) c = -c;
    ds.add(std::vector<double>{x, y}, c);
  }
  return ds;
}

Outcome edge_weights() {
  const Dataset ds = gapped_dataset_one(32000, 0.04, 1);
  HeuristicParams p = shed_params();
  p.n_clusters = 300;
  const auto cl = cluster(ds, p.n_clusters, p.cluster_iters, p.seed);
  const PatternGraph g = knit(cl.clusters, p);
  const double cross = 2 + std::exp(8.0);
  std::size_t same_edges = 0, cross_edges = 0, bad = 0;
  double worst_rel = 0;
  for (const auto& e : g.edges()) {
    const bool pure = std::abs(g.nodes[e.u].tc) == 1.0 && std::abs(g.nodes[e.v].tc) == 1.0;
    if (!pure) continue;
    if (g.node_class(e.u) == g.node_class(e.v)) {
      ++same_edges;
      bad += e.weight != 3.0 || e.weight >= p.gs_edge_cut;
    } else {
      ++cross_edges;
      const double rel = std::abs(e.weight - cross) / cross;
      worst_rel = std::max(worst_rel, rel);
      bad += rel > kCrossWeightRelTol || e.weight < p.gs_edge_cut;
    }
  }
  // Nodes whose only edges are pure same-class edges are shed; pure
  // opposite-class endpoints are kept.
  const auto kept = shed(g, p.gs_edge_cut);
  std::vector<char> in(g.node_count(), 0);
  for (auto i : kept) in[i] = 1;
  std::size_t misplaced = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    bool only_pure_same = std::abs(g.nodes[i].tc) == 1.0, has_pure_cross = false;
    for (const auto& e : g.adjacency[i]) {
      const bool pure_pair = std::abs(g.nodes[i].tc) == 1.0 && std::abs(g.nodes[e.to].tc) == 1.0;
      const bool same = g.node_class(i) == g.node_class(e.to);
      only_pure_same &= pure_pair && same;
      has_pure_cross |= pure_pair && !same;
    }
    misplaced += (only_pure_same && in[i]) || (has_pure_cross && !in[i]);
  }
  return {bad == 0 && misplaced == 0 && same_edges > 0 && cross_edges > 0,
          fmt("%zu pure same-class edges == 3, %zu pure cross edges, max rel err %.1e (tol %.0e), "
              "%zu mis-shed nodes",
              same_edges, cross_edges, worst_rel, kCrossWeightRelTol, misplaced)};
}

Outcome imbalance() {
  const Dataset ds = slab_dataset(12000, 1);
  const Reduction r = reduce(ds, shed_params());
  const auto before = ds.class_counts();
  const double sd_before = imbalance_sd(before), sd_after = imbalance_sd(r.relevant.per_class_counts);
  return {sd_after * kImbalanceFactor <= sd_before,
          fmt("counts %zu:%zu (1:%.2f), sd before %.1f, after %.1f (%zu:%zu), ratio %.1f (need >= %.0f)",
              before[1], before[0], double(before[0]) / double(before[1]), sd_before, sd_after,
              r.relevant.per_class_counts[1], r.relevant.per_class_counts[0],
              sd_after > 0 ? sd_before / sd_after : INFINITY, kImbalanceFactor)};
}

Outcome accuracy_parity() {
  const auto& s = accuracy_setting();
  const double full = accuracy(predict(train_full(s.train, linear_spec()), s.test), s.test.targets());
  const GshResult gsh = train_gsh(s.train, shed_params(), linear_spec());
  const double reduced = accuracy(predict(gsh.model, s.test), s.test.targets());
  return {full >= kFullAccuracyMin && std::abs(reduced - full) <= kGshAccuracyGap,
          fmt("full %.4f (need >= %.2f), GSH %.4f on %zu points, gap %.4f (need <= %.2f)", full,
              kFullAccuracyMin, reduced, gsh.report.reduced_size, std::abs(reduced - full), kGshAccuracyGap)};
}

struct GchRun {
  GchResult gch;
  std::unique_ptr<Router> router;
};

const GchRun& gch_run() {
  static const GchRun r = [] {
    const auto& s = accuracy_setting();
    GchRun out;
    out.gch = train_gch_serial(s.train, case_one(), linear_spec());
    out.router = std::make_unique<Router>(build_router(out.gch.club.parts, out.gch.reduction.clustering));
    return out;
  }();
  return r;
}

Outcome gch_accuracy() {
  const auto& s = accuracy_setting();
  const GchRun& r = gch_run();
  const auto pred = ensemble_predict(r.gch.ensemble, *r.router, s.test);
  return {pred.report.weighted_accuracy >= kGchAccuracyMin,
          fmt("weighted accuracy %.4f over %zu partitions (need >= %.2f)", pred.report.weighted_accuracy,
              r.gch.ensemble.size(), kGchAccuracyMin)};
}

Outcome partition_count() {
  std::string counts;
  bool ok = true;
  for (std::size_t n : {5000, 10000, 20000, 50000, 100000}) {
    const Dataset ds = gen_dataset_one(n, 2, 0.02, 1);
    const Clubbed c = reduce_and_club(ds, case_one());
    const std::size_t k = c.club.parts.size();
    std::size_t multi = 0;
    for (const auto& part : c.club.parts.partitions) multi += part.cluster_ids.size() > 1;
    ok &= k >= kPartitionsMin && k <= kPartitionsMax;
    counts += fmt("%s%zuk:%zu(%zu multi)", counts.empty() ? "" : " ", n / 1000, k, multi);
  }
  return {ok, fmt("partitions %s (need %zu..%zu at every size)", counts.c_str(), kPartitionsMin, kPartitionsMax)};
}

Outcome cost_kink() {
  const Dataset ds = gen_dataset_one(30000, 2, 0.02, 1);
  HeuristicParams p = case_one();
  p.n_clusters = 300;
  const Clubbed c = reduce_and_club(ds, p);
  const auto& h = c.club.cost_history;
  bool monotone = true;
  for (std::size_t t = 1; t < h.size(); ++t) monotone &= h[t] <= h[t - 1];
  // delta[t] = h[t-1] - h[t]; a missing entry means coarsening had stopped.
  auto delta = [&](std::size_t t) { return t < h.size() ? h[t - 1] - h[t] : 0.0; };
  double best = 0;
  std::size_t at = 0;
  for (std::size_t t = 1; t <= 3; ++t) {
    const double a = delta(t), b = delta(t + 1);
    if (a <= 0) continue;
    const double ratio = b > 0 ? a / b : INFINITY;
    if (ratio > best) {
      best = ratio;
      at = t;
    }
  }
  std::string hist;
  for (std::size_t t = 0; t < std::min<std::size_t>(h.size(), 6); ++t) hist += fmt("%s%.4g", t ? " " : "", h[t]);
  return {monotone && best >= kKinkDropFactor,
          fmt("cost %s, non-increasing %s, max backward-difference drop %.3g at iteration %zu (need >= %.0f)",
              hist.c_str(), monotone ? "yes" : "no", best, at, kKinkDropFactor)};
}

Outcome speedup_order() {
  const Dataset ds = gen_dataset_one(50000, 2, 0.02, 1);
  std::vector<double> full, gsh, gch;
  for (int rep = 0; rep < 3; ++rep) {
    Stopwatch sw;
    train_full(ds, rbf_spec());
    full.push_back(sw.elapsed_ms());
    sw.reset();
    train_gsh(ds, shed_params(), rbf_spec());
    gsh.push_back(sw.elapsed_ms());
    sw.reset();
    train_gch_serial(ds, case_one(), rbf_spec());
    gch.push_back(sw.elapsed_ms());
  }
  const double f = median(full), s = median(gsh), c = median(gch);
  return {c <= kSpeedupMargin * s && s <= kSpeedupMargin * f,
          fmt("median ms: GCH %.0f < GSH %.0f < full %.0f (ratios %.2f, %.2f; need <= %.2f)", c, s, f, c / s, s / f,
              kSpeedupMargin)};
}

Outcome route_overhead() {
  const auto& s = accuracy_setting();
  const GchRun& r = gch_run();
  std::vector<double> fractions;
  for (int rep = 0; rep < 7; ++rep)
    fractions.push_back(ensemble_predict(r.gch.ensemble, *r.router, s.test).report.route_fraction());
  const double m = median(fractions);
  return {m <= kRouteFractionMax,
          fmt("median routing share %.3f of test-phase time over 7 runs, %zu test points (need <= %.2f)", m,
              s.test.size(), kRouteFractionMax)};
}

bool same_model(TrainedModel a, TrainedModel b) {
  if (a.is_constant() && b.is_constant()) a.dim = b.dim = 0;
  return a == b;
}

double serve_ms(const Dataset& ds, const PartitionSet& parts, std::size_t workers,
                const std::filesystem::path& dir, const ClassifierSpec& spec) {
  distnet::Master master("127.0.0.1:0");
  distnet::WorkerOptions o;
  o.endpoint = master.endpoint();
  o.spec = spec;
  o.model_dir = dir;
  Stopwatch sw;
  const auto pids = distnet::spawn_local_workers(o, workers);
  master.connect_phase(workers, 30);
  master.serve(ds, parts, 120, 1);
  if (distnet::wait_workers(pids) != 0) throw Error("a worker exited abnormally");
  return sw.elapsed_ms();
}

Outcome distributed_equivalence() {
  const Dataset ds = gen_dataset_one(20000, 2, 0.02, 1);
  const GchResult serial = train_gch_serial(ds, case_one(), rbf_spec());
  gheur::testing::TempDir dir;
  serve_ms(ds, serial.club.parts, 2, dir.path(), rbf_spec());
  std::size_t mismatched = 0;
  for (std::size_t p = 0; p < serial.ensemble.size(); ++p)
    mismatched += !same_model(load_model(distnet::model_path(dir.path(), p)), serial.ensemble.models[p]);
  return {mismatched == 0, fmt("%zu of %zu partition models differ from serial GCH", mismatched,
                               serial.ensemble.size())};
}

Outcome worker_scaling() {
  // Four equal noisy partitions so that training dominates messaging.
  constexpr std::size_t block = 8000;
  const Dataset ds = gen_dataset_one(4 * block, 2, 0.6, 7);
  PartitionSet parts;
  for (std::size_t p = 0; p < 4; ++p) {
    Partition part;
    part.id = p;
    part.cluster_ids = {p};
    for (std::size_t i = p * block; i < (p + 1) * block; ++i) part.point_ids.push_back(i);
    parts.partitions.push_back(part);
  }
  std::vector<double> one, two;
  for (int rep = 0; rep < 3; ++rep) {
    gheur::testing::TempDir a, b;
    one.push_back(serve_ms(ds, parts, 1, a.path(), rbf_spec()));
    two.push_back(serve_ms(ds, parts, 2, b.path(), rbf_spec()));
  }
  const double t1 = median(one), t2 = median(two);
  return {t1 >= kWorkerSpeedupMin * t2,
          fmt("median ms: 1 worker %.0f, 2 workers %.0f, speed-up %.2f (need >= %.1f); %u hardware threads",
              t1, t2, t1 / t2, kWorkerSpeedupMin, std::thread::hardware_concurrency())};
}

Outcome protocol_comparison() {
  bool ok = true;
  std::string detail;
  for (std::size_t d : {2, 5}) {
    const BenchRow r = run_protocol_bench(d, 10000, 2, 3, 1);
    ok &= r.messages_p2 == (d + 1) * r.messages_p1 && r.p1_ms < r.p2_ms;
    detail += fmt("%sd=%zu: msgs %zu vs %zu (x%.2f), ms %.1f vs %.1f", detail.empty() ? "" : "; ", d,
                  r.messages_p1, r.messages_p2, double(r.messages_p2) / double(r.messages_p1), r.p1_ms, r.p2_ms);
  }
  return {ok, detail + " (need x(d+1) and protocol 1 faster)"};
}

Outcome oracle_suites() {
  using gheur::testing::uniform_points;
  std::size_t ann_bad = 0, pwm_bad = 0, route_bad = 0, kkt_bad = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 1 + seed % 4;
    const auto pts = uniform_points(100, d, seed);
    const auto qs = uniform_points(30, d, seed + 1000);
    const NNIndex idx(pts, d);
    for (std::size_t k = 1; k <= 10; ++k) {
      const KnnResult r = idx.knn_search(qs, k);
      for (std::size_t q = 0; q < 30; ++q) {
        const auto want = oracle::brute_knn(pts, d, std::span<const double>(qs).subspan(q * d, d), k);
        for (std::size_t t = 0; t < k; ++t)
          ann_bad += r.row_indices(q)[t] != want[t].second || r.row_dists(q)[t] != std::sqrt(want[t].first);
      }
    }
  }
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 60;
    const auto edges = oracle::random_edges(n, rng);
    const double cut = trial % 3 == 0 ? 3.01 : 3.2;
    pwm_bad += pwm(gheur::testing::weighted_graph(n, edges), cut).pairs !=
               oracle::sort_and_scan_matching(edges, n, cut);
  }
  {
    const auto centers = uniform_points(60, 3, 1);
    std::vector<RouterEntry> entries;
    for (std::size_t c = 0; c < 60; ++c)
      entries.push_back({c, rng() % 7, {centers.begin() + 3 * c, centers.begin() + 3 * c + 3}});
    const Router router(entries, SearchMode::exact);
    const auto pts = uniform_points(1000, 3, 51);
    Dataset test(3);
    for (std::size_t i = 0; i < 1000; ++i) test.add(std::span<const double>(pts).subspan(3 * i, 3), 1);
    const auto routed = router.route(test);
    for (std::size_t i = 0; i < 1000; ++i) route_bad += routed[i] != oracle::nearest_partition(entries, test.features(i));
  }
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Dataset ds = gen_dataset_one(200, 2, 0.1, seed);
    ClassifierSpec spec;
    spec.kernel.kind = static_cast<KernelKind>(seed % 3);
    spec.kernel.coef0 = 1.0;
    spec.kernel.degree = 2;
    spec.C = 5.0;
    SmoTrace tr;
    const TrainedModel m = train(ds, spec, &tr);
    const auto k = oracle::check_kkt(ds, spec, m, tr.alpha);
    kkt_bad += !tr.converged || !k.box_feasible || k.balance > 1e-9 * spec.C * 200 ||
               k.max_violation > kKktTolFactor * spec.tol || k.max_decision_gap > 1e-8;
  }
  return {ann_bad + pwm_bad + route_bad + kkt_bad == 0,
          fmt("mismatches: ANN %zu (20 instances, k<=10), PWM %zu (100 graphs), router %zu (1000 points), "
              "SMO KKT %zu (6 problems, tol x%.0f)",
              ann_bad, pwm_bad, route_bad, kkt_bad, kKktTolFactor)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string only;
  app.add_option("--only", only, "run one criterion by id (1..11, 9a, 9b)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"1", "edge-weight fixture", 1, edge_weights},
      {"2", "class imbalance after shedding", 30, imbalance},
      {"3", "accuracy parity, full vs GSH", 300, accuracy_parity},
      {"4", "GCH weighted accuracy", 300, gch_accuracy},
      {"5", "partition count across 5k..100k", 600, partition_count},
      {"6", "graph-cost kink", 60, cost_kink},
      {"7", "speed-up ordering at 50k", 1800, speedup_order},
      {"8", "routing overhead", 300, route_overhead},
      {"9a", "distributed equals serial GCH", 900, distributed_equivalence},
      {"9b", "2 workers vs 1 worker", 900, worker_scaling},
      {"10", "protocol comparison", 120, protocol_comparison},
      {"11", "oracle suites", 120, oracle_suites},
  };

  std::size_t ran = 0, failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && c.id != only && !(only == "9" && c.id[0] == '9' && c.id.size() == 2)) continue;
    ++ran;
    Outcome o;
    Stopwatch sw;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = sw.elapsed_ms() / 1000.0;
    const bool in_budget = s <= c.budget_s;
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::printf("%s  %-3s %-34s %s | %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id.c_str(),
                c.name.c_str(), o.detail.c_str(), s, c.budget_s, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
