// gheur: command-line front end for the reduction, partitioning, training and
// distributed training pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "gheur/bench.hpp"
#include "gheur/config.hpp"
#include "gheur/distnet/master.hpp"
#include "gheur/distnet/worker.hpp"
#include "gheur/jsonl.hpp"
#include "gheur/pipeline.hpp"
#include "gheur/predict.hpp"

namespace fs = std::filesystem;
using namespace gheur;

namespace {

std::string dashed(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

Dataset load_data(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return load_csv(path);
  return load_libsvm_format(path);
}

void save_data(const Dataset& ds, const fs::path& path) {
  if (path.extension() == ".csv")
    save_csv(ds, path);
  else
    save_libsvm_format(ds, path);
}

Dataset generate(const Config& c, std::size_t n, std::uint64_t seed) {
  GeneratorNoise noise{c.noise, c.shell_width};
  if (c.dataset == "one") return gen_dataset_one(n, c.d, c.margin, seed, noise);
  return gen_dataset_two(n, c.d, c.radius, seed, noise);
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Json effective(const Config& c, const std::string& command) {
  Json j = c.to_json();
  j["command"] = command;
  return j;
}

void print_json(const Json& j) { std::cout << j.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based training-set reduction, partitioning and distributed SVM training"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
  app.add_option("--config", config_file, "key = value configuration file");
  app.add_option("--set", sets, "override a config key, key=value (repeatable)");
  for (const auto& key : Config::keys()) {
    app.add_option_function<std::string>(
        "--" + dashed(key), [&overrides, key](const std::string& v) { overrides[key] = v; },
        "config key " + key);
  }

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate Dataset I or II");
  std::string gen_out, gen_test_out;
  std::size_t gen_test_n = 0;
  gen->add_option("--out", gen_out, "output file (.csv or LIBSVM text)")->required();
  gen->add_option("--test-out", gen_test_out, "optional held-out file drawn with a different seed");
  gen->add_option("--test-n", gen_test_n, "held-out size (default: n)");

  // cluster
  auto* cl = app.add_subcommand("cluster", "k-means++ clustering");
  std::string cl_data, cl_out;
  cl->add_option("--data", cl_data)->required();
  cl->add_option("--out", cl_out)->required();

  // knit
  auto* kn = app.add_subcommand("knit", "build the class-pattern graph over clusters");
  std::string kn_clusters, kn_out;
  kn->add_option("--clusters", kn_clusters)->required();
  kn->add_option("--out", kn_out)->required();

  // shed
  auto* sh = app.add_subcommand("shed", "keep clusters with a significant edge");
  std::string sh_graph, sh_clusters, sh_out;
  sh->add_option("--graph", sh_graph)->required();
  sh->add_option("--clusters", sh_clusters)->required();
  sh->add_option("--out", sh_out)->required();

  // club
  auto* cb = app.add_subcommand("club", "coarsen the shed graph into partitions");
  std::string cb_graph, cb_clusters, cb_relevant, cb_out, cb_cost;
  cb->add_option("--graph", cb_graph)->required();
  cb->add_option("--clusters", cb_clusters)->required();
  cb->add_option("--relevant", cb_relevant)->required();
  cb->add_option("--out", cb_out)->required();
  cb->add_option("--cost", cb_cost, "per-iteration graph cost CSV");

  // train
  auto* tr = app.add_subcommand("train", "train on the full, shed or partitioned set");
  std::string tr_data, tr_test, tr_relevant, tr_parts, tr_model, tr_model_dir, tr_report;
  bool tr_full = false, tr_gsh = false, tr_gch = false;
  tr->add_option("--data", tr_data)->required();
  tr->add_option("--test", tr_test, "held-out set; accuracy is reported on it");
  tr->add_flag("--full", tr_full, "train on every point");
  tr->add_flag("--gsh", tr_gsh, "cluster, knit, shed and train in one go");
  tr->add_flag("--gch", tr_gch, "cluster, knit, shed, club and train each partition");
  tr->add_option("--relevant", tr_relevant, "train on a shed set from a file");
  tr->add_option("--parts", tr_parts, "train every partition from a file");
  tr->add_option("--model", tr_model, "model file for single-model modes");
  tr->add_option("--model-dir", tr_model_dir, "model directory for partitioned modes");
  tr->add_option("--report", tr_report, "JSON report path");

  // serve
  auto* sv = app.add_subcommand("serve", "master: hand partitions to workers");
  std::string sv_data, sv_parts, sv_log;
  sv->add_option("--data", sv_data)->required();
  sv->add_option("--parts", sv_parts)->required();
  sv->add_option("--log", sv_log, "JSON serve log path");

  // work
  auto* wk = app.add_subcommand("work", "worker: request, train and acknowledge partitions");
  std::string wk_model_dir = ".", wk_identity;
  wk->add_option("--model-dir", wk_model_dir);
  wk->add_option("--identity", wk_identity, "worker identity (default host:port:pid)");

  // predict
  auto* pr = app.add_subcommand("predict", "route test points and predict");
  std::string pr_data, pr_model, pr_models, pr_parts, pr_out, pr_report;
  pr->add_option("--data", pr_data)->required();
  pr->add_option("--model", pr_model, "single model file");
  pr->add_option("--models", pr_models, "directory of part-<id>.model files");
  pr->add_option("--parts", pr_parts, "partition file for routing");
  pr->add_option("--out", pr_out, "predicted labels, one per line");
  pr->add_option("--report", pr_report, "JSON accuracy report");

  // bench
  auto* bn = app.add_subcommand("bench", "timing and accuracy sweeps");
  std::string bn_kind = "sweep", bn_out, bn_summary;
  std::vector<std::size_t> bn_sizes{1000};
  std::vector<std::size_t> bn_nc{0};
  std::vector<std::string> bn_pipelines{"full", "gsh", "gch_serial"};
  std::size_t bn_reps = 5, bn_test = 0;
  bn->add_option("--kind", bn_kind, "sweep | protocol")->check(CLI::IsMember({"sweep", "protocol"}));
  bn->add_option("--sizes", bn_sizes, "training size ladder")->delimiter(',');
  bn->add_option("--cluster-counts", bn_nc, "n_c ladder, 0 derives it")->delimiter(',');
  bn->add_option("--pipelines", bn_pipelines, "full,gsh,gch_serial,gch_dist")->delimiter(',');
  bn->add_option("--reps", bn_reps);
  bn->add_option("--test-size", bn_test);
  bn->add_option("--out", bn_out, "CSV output");
  bn->add_option("--summary", bn_summary, "JSON summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    ConfigSources src;
    if (!config_file.empty()) src.file = fs::path(config_file);
    src.env = gheur_environment();
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      src.overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto& [k, v] : overrides) src.overrides[k] = v;
    const Config cfg = load_config(src);
    cfg.apply_threads();
    const std::string command = app.get_subcommands().front()->get_name();
    const Json eff = effective(cfg, command);

    if (*gen) {
      const Dataset ds = generate(cfg, cfg.n, cfg.heuristic.seed);
      save_data(ds, gen_out);
      write_config_sidecar(gen_out, eff);
      if (!gen_test_out.empty()) {
        const Dataset test = generate(cfg, gen_test_n ? gen_test_n : cfg.n, cfg.heuristic.seed + 1000003);
        save_data(test, gen_test_out);
        write_config_sidecar(gen_test_out, eff);
      }
      const auto counts = ds.class_counts();
      print_json({{"points", ds.size()}, {"dim", ds.dim()}, {"negatives", counts[0]}, {"positives", counts[1]}});
    } else if (*cl) {
      const Dataset ds = load_data(cl_data);
      Stopwatch sw;
      const ClusteringResult c =
          cluster(ds, cfg.heuristic.clusters_for(ds.size()), cfg.heuristic.cluster_iters, cfg.heuristic.seed);
      const double ms = sw.elapsed_ms();
      write_clustering(cl_out, c, eff);
      print_json({{"clusters", c.clusters.size()}, {"iterations", c.iterations_run}, {"ms", ms}});
    } else if (*kn) {
      const ClusteringResult c = read_clustering(kn_clusters);
      Stopwatch sw;
      const PatternGraph g = knit(c.clusters, cfg.heuristic);
      const double ms = sw.elapsed_ms();
      write_graph(kn_out, g, eff);
      print_json({{"nodes", g.node_count()}, {"edges", g.edge_count()}, {"ms", ms}});
    } else if (*sh) {
      const PatternGraph g = read_graph(sh_graph);
      const ClusteringResult c = read_clustering(sh_clusters);
      const RelevantSet r = relevant_set(g, c, cfg.heuristic.gs_edge_cut);
      if (r.degenerate())
        throw Error("empty reduced set: no cluster has an edge of weight >= " +
                    format_double(cfg.heuristic.gs_edge_cut) + "; lower gs_edge_cut");
      write_relevant(sh_out, r, eff);
      print_json({{"relevant_clusters", r.cluster_ids.size()},
                  {"points", r.point_ids.size()},
                  {"counts", r.per_class_counts},
                  {"imbalance_sd", imbalance_sd(r.per_class_counts)}});
    } else if (*cb) {
      const PatternGraph g = read_graph(cb_graph);
      const ClusteringResult c = read_clustering(cb_clusters);
      const RelevantSet r = read_relevant(cb_relevant);
      const ClubResult res = club(restrict_to(g, r.cluster_ids), c, cfg.heuristic);
      write_partitions(cb_out, res.parts, c, eff);
      if (!cb_cost.empty()) write_cost_csv(cb_cost, res, eff);
      std::vector<std::size_t> sizes;
      for (const auto& p : res.parts.partitions) sizes.push_back(p.size());
      print_json({{"partitions", res.parts.size()},
                  {"sizes", sizes},
                  {"iterations", res.iterations_run},
                  {"cost_history", res.cost_history}});
    } else if (*tr) {
      const int modes = tr_full + tr_gsh + tr_gch + !tr_relevant.empty() + !tr_parts.empty();
      if (modes != 1) throw UsageError("train needs exactly one of --full, --gsh, --gch, --relevant, --parts");
      const Dataset ds = load_data(tr_data);
      std::optional<Dataset> test;
      if (!tr_test.empty()) test = load_data(tr_test);
      const Dataset& eval = test ? *test : ds;
      Json out = {{"mode", tr_full ? "full" : tr_gsh ? "gsh" : tr_gch ? "gch" : !tr_relevant.empty() ? "relevant" : "parts"},
                  {"evaluated_on", test ? "test" : "train"}};

      auto save_single = [&](const TrainedModel& m) {
        if (tr_model.empty()) return;
        save_model(m, tr_model);
        write_config_sidecar(tr_model, eff);
      };
      auto save_many = [&](const EnsembleModel& e) {
        if (tr_model_dir.empty()) return;
        fs::create_directories(tr_model_dir);
        for (std::size_t p = 0; p < e.size(); ++p) save_model(e.models[p], distnet::model_path(tr_model_dir, p));
        write_json(fs::path(tr_model_dir) / "config.json", eff);
      };

      if (tr_full || !tr_relevant.empty()) {
        Dataset train_set = ds;
        if (!tr_relevant.empty()) train_set = ds.subset(read_relevant(tr_relevant).point_ids);
        double ms = 0.0;
        const TrainedModel m = train_full(train_set, cfg.classifier, &ms);
        save_single(m);
        out["train_points"] = train_set.size();
        out["support_vectors"] = m.sv_count();
        out["train_ms"] = ms;
        out["accuracy"] = accuracy(predict(m, eval), eval.targets());
      } else if (tr_gsh) {
        const GshResult r = train_gsh(ds, cfg.heuristic, cfg.classifier);
        save_single(r.model);
        out["report"] = r.report.to_json();
        out["accuracy"] = accuracy(predict(r.model, eval), eval.targets());
      } else {
        EnsembleModel ens;
        std::vector<RouterEntry> entries;
        if (tr_gch) {
          GchResult r = train_gch_serial(ds, cfg.heuristic, cfg.classifier);
          out["report"] = r.report.to_json();
          for (const auto& p : r.club.parts.partitions)
            for (auto c : p.cluster_ids) entries.push_back({c, p.id, r.reduction.clustering.clusters[c].center});
          ens = std::move(r.ensemble);
        } else {
          PartitionFile pf = read_partitions(tr_parts);
          std::vector<double> ms;
          std::size_t constant = 0;
          ens = train_partitions(ds, pf.parts, cfg.classifier, &ms, &constant);
          out["partition_train_ms"] = ms;
          out["constant_partitions"] = constant;
          entries = std::move(pf.router_entries);
        }
        save_many(ens);
        const Router router(std::move(entries), cfg.heuristic.search_mode);
        const EnsemblePrediction pred = ensemble_predict(ens, router, eval);
        out["partitions"] = ens.size();
        out["accuracy_report"] = pred.report.to_json();
        out["accuracy"] = pred.report.weighted_accuracy;
      }
      if (!tr_report.empty()) write_json(tr_report, Json{{"config", eff}, {"result", out}});
      print_json(out);
    } else if (*sv) {
      const Dataset ds = load_data(sv_data);
      const PartitionFile pf = read_partitions(sv_parts);
      const std::string endpoint = cfg.endpoint;
      distnet::Master master(endpoint);
      std::cerr << "listening on " << master.endpoint() << std::endl;
      const distnet::ConnectReport conn = master.connect_phase(cfg.workers, cfg.timeout);
      const distnet::ServeLog log = master.serve(ds, pf.parts, cfg.timeout, cfg.protocol);
      Json acks = Json::array();
      for (const auto& a : log.acks) acks.push_back({{"partition", a.partition}, {"worker", a.worker}, {"ok", a.ok}});
      Json j = {{"workers", conn.identities},       {"connect_ms", conn.elapsed_ms},
                {"rejected", conn.rejected},        {"data_begin", log.data_begin_count()},
                {"acks", acks},                     {"requeued", log.requeued},
                {"term_sent", log.term_sent},       {"messages_sent", log.messages_sent},
                {"bytes_sent", log.bytes_sent},     {"serve_ms", log.elapsed_ms},
                {"failed", log.failed}};
      if (!sv_log.empty()) write_json(sv_log, Json{{"config", eff}, {"log", j}});
      print_json(j);
      if (!log.failed.empty()) throw Error(std::to_string(log.failed.size()) + " partitions failed to train");
    } else if (*wk) {
      distnet::WorkerOptions o;
      o.endpoint = cfg.endpoint;
      o.spec = cfg.classifier;
      o.model_dir = wk_model_dir;
      o.timeout_s = cfg.timeout;
      o.identity = wk_identity;
      const distnet::WorkerReport r = distnet::worker_loop(o);
      write_json(fs::path(wk_model_dir) / ("worker-" + std::to_string(r.key) + ".config.json"), eff);
      print_json({{"key", r.key}, {"trained", r.partitions}, {"failed", r.failed}, {"train_ms", r.train_ms}});
    } else if (*pr) {
      const Dataset test = load_data(pr_data);
      std::vector<int> labels;
      Json out;
      if (!pr_model.empty()) {
        const TrainedModel m = load_model(pr_model);
        Stopwatch sw;
        labels = predict(m, test);
        out = {{"accuracy", accuracy(labels, test.targets())}, {"predict_ms", sw.elapsed_ms()}};
      } else {
        if (pr_models.empty() || pr_parts.empty())
          throw UsageError("predict needs --model, or --models with --parts");
        PartitionFile pf = read_partitions(pr_parts);
        EnsembleModel ens;
        for (std::size_t p = 0; p < pf.parts.size(); ++p)
          ens.models.push_back(load_model(distnet::model_path(pr_models, p)));
        const Router router(std::move(pf.router_entries), cfg.heuristic.search_mode);
        const EnsemblePrediction pred = ensemble_predict(ens, router, test);
        labels = pred.labels;
        out = pred.report.to_json();
        out["accuracy"] = pred.report.weighted_accuracy;
      }
      if (!pr_out.empty()) {
        std::ofstream f(pr_out);
        for (int l : labels) f << l << "\n";
        write_config_sidecar(pr_out, eff);
      }
      if (!pr_report.empty()) write_json(pr_report, Json{{"config", eff}, {"result", out}});
      print_json(out);
    } else if (*bn) {
      std::vector<BenchRow> rows;
      if (bn_kind == "protocol") {
        rows.push_back(run_protocol_bench(cfg.d, cfg.n, cfg.workers, bn_reps, cfg.heuristic.seed));
      } else {
        SweepSpec s;
        s.dataset = cfg.dataset;
        s.sizes = bn_sizes;
        s.cluster_counts = bn_nc;
        s.pipelines = bn_pipelines;
        s.test_size = bn_test;
        s.d = cfg.d;
        s.margin = cfg.margin;
        s.radius = cfg.radius;
        s.noise = {cfg.noise, cfg.shell_width};
        s.classifier = cfg.classifier;
        s.heuristic = cfg.heuristic;
        s.repetitions = bn_reps;
        s.workers = cfg.workers;
        s.seed = cfg.heuristic.seed;
        rows = run_sweep(s);
      }
      if (!bn_out.empty()) {
        write_bench_csv(bn_out, rows);
        write_config_sidecar(bn_out, eff);
      }
      Json summary = bench_summary(rows);
      summary["config"] = eff;
      if (!bn_summary.empty()) write_json(bn_summary, summary);
      print_json(bench_summary(rows));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
