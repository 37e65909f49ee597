#include "gheur/bench.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "gheur/distnet/master.hpp"
#include "gheur/distnet/socket.hpp"
#include "gheur/distnet/worker.hpp"
#include "gheur/pipeline.hpp"
#include "gheur/predict.hpp"

namespace gheur {

namespace {

Dataset generate(const SweepSpec& s, std::size_t n, std::uint64_t seed) {
  if (s.dataset == "one") return gen_dataset_one(n, s.d, s.margin, seed, s.noise);
  return gen_dataset_two(n, s.d, s.radius, seed, s.noise);
}

double test_accuracy(const TrainedModel& m, const Dataset& test) {
  const auto labels = predict(m, test);
  return accuracy(labels, test.targets());
}

struct Sample {
  StageTimings t;
  double route_ms = 0.0, predict_ms = 0.0, total_ms = 0.0;
  double accuracy = 0.0;
  std::size_t partitions = 0, reduced = 0, n_clusters = 0;
};

Sample run_once(const std::string& pipeline, const Dataset& train_ds, const Dataset& test,
                const HeuristicParams& hp, const SweepSpec& s) {
  Sample out;
  Stopwatch total;
  if (pipeline == "full") {
    TrainedModel m = train_full(train_ds, s.classifier, &out.t.train_ms);
    Stopwatch sw;
    out.accuracy = test_accuracy(m, test);
    out.predict_ms = sw.elapsed_ms();
    out.partitions = 1;
    out.reduced = train_ds.size();
  } else if (pipeline == "gsh") {
    GshResult r = train_gsh(train_ds, hp, s.classifier);
    out.t = r.report.timings;
    Stopwatch sw;
    out.accuracy = test_accuracy(r.model, test);
    out.predict_ms = sw.elapsed_ms();
    out.partitions = 1;
    out.reduced = r.report.reduced_size;
    out.n_clusters = r.report.n_clusters;
  } else if (pipeline == "gch_serial" || pipeline == "gch_dist") {
    EnsembleModel ens;
    Clubbed c;
    if (pipeline == "gch_serial") {
      GchResult r = train_gch_serial(train_ds, hp, s.classifier);
      out.t = r.report.timings;
      ens = std::move(r.ensemble);
      c.reduction = std::move(r.reduction);
      c.club = std::move(r.club);
    } else {
      c = reduce_and_club(train_ds, hp);
      out.t = c.reduction.timings;
      const auto dir = std::filesystem::temp_directory_path() /
                       ("gheur-bench-" + std::to_string(::getpid()) + "-" + std::to_string(train_ds.size()));
      std::filesystem::remove_all(dir);
      distnet::Master master("127.0.0.1:0");
      distnet::WorkerOptions wo;
      wo.endpoint = master.endpoint();
      wo.spec = s.classifier;
      wo.model_dir = dir;
      Stopwatch sw;
      const auto pids = distnet::spawn_local_workers(wo, s.workers);
      master.connect_phase(s.workers, 60.0);
      const auto log = master.serve(train_ds, c.club.parts, 600.0);
      if (distnet::wait_workers(pids) != 0) throw Error("a worker exited abnormally");
      out.t.train_ms = sw.elapsed_ms();
      if (!log.failed.empty()) throw Error("worker training failed");
      for (std::size_t p = 0; p < c.club.parts.size(); ++p)
        ens.models.push_back(load_model(distnet::model_path(dir, p)));
      std::filesystem::remove_all(dir);
    }
    const Router router = build_router(c.club.parts, c.reduction.clustering, hp.search_mode);
    const EnsemblePrediction pred = ensemble_predict(ens, router, test);
    out.accuracy = pred.report.weighted_accuracy;
    out.route_ms = pred.report.route_ms;
    out.predict_ms = pred.report.predict_ms;
    out.partitions = c.club.parts.size();
    out.reduced = c.reduction.relevant.point_ids.size();
    out.n_clusters = c.reduction.clustering.clusters.size();
  } else {
    throw Error("unknown pipeline '" + pipeline + "'");
  }
  out.total_ms = total.elapsed_ms();
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c == '\n' ? ' ' : c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  return out;
}

}  // namespace

void SweepSpec::validate() const {
  if (sizes.empty()) throw Error("size ladder is empty");
  if (cluster_counts.empty()) throw Error("cluster ladder is empty");
  if (repetitions < 1) throw Error("repetitions must be at least 1");
  if (dataset != "one" && dataset != "two") throw Error("dataset must be one or two");
  classifier.validate();
  heuristic.validate();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

std::vector<BenchRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<BenchRow> rows;
  for (std::size_t n : spec.sizes) {
    const Dataset train_ds = generate(spec, n, spec.seed);
    const Dataset test = generate(spec, spec.test_size ? spec.test_size : n, spec.seed + 1000003);
    for (std::size_t nc : spec.cluster_counts) {
      HeuristicParams hp = spec.heuristic;
      hp.n_clusters = nc;
      for (const auto& pipeline : spec.pipelines) {
        BenchRow row;
        row.pipeline = pipeline;
        row.dataset = spec.dataset;
        row.n = n;
        row.d = spec.d;
        row.n_clusters = hp.clusters_for(n);
        std::vector<Sample> samples;
        try {
          for (std::size_t rep = 0; rep < spec.repetitions; ++rep)
            samples.push_back(run_once(pipeline, train_ds, test, hp, spec));
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        row.repetitions = samples.size();
        if (!samples.empty()) {
          auto med = [&](auto field) {
            std::vector<double> v;
            for (const auto& s : samples) v.push_back(field(s));
            return median(v);
          };
          row.cluster_ms = med([](const Sample& s) { return s.t.cluster_ms; });
          row.knit_ms = med([](const Sample& s) { return s.t.knit_ms; });
          row.shed_ms = med([](const Sample& s) { return s.t.shed_ms; });
          row.club_ms = med([](const Sample& s) { return s.t.club_ms; });
          row.train_ms = med([](const Sample& s) { return s.t.train_ms; });
          row.route_ms = med([](const Sample& s) { return s.route_ms; });
          row.predict_ms = med([](const Sample& s) { return s.predict_ms; });
          row.total_ms = med([](const Sample& s) { return s.total_ms; });
          row.accuracy = samples.front().accuracy;
          row.partitions = samples.front().partitions;
          row.reduced_size = samples.front().reduced;
          if (pipeline == "full") row.n_clusters = 0;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

BenchRow run_protocol_bench(std::size_t d, std::size_t n_points, std::size_t workers,
                            std::size_t repetitions, std::uint64_t seed) {
  if (d == 0) throw ProtocolError("empty features");
  if (workers == 0) throw Error("protocol bench needs at least one receiver");
  if (repetitions == 0) throw Error("repetitions must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<LabeledPoint> points(n_points);
  for (auto& p : points) {
    p.features.resize(d);
    for (auto& v : p.features) v = u(rng);
    p.target = u(rng) < 0.5 ? -1 : 1;
  }

  BenchRow row;
  row.pipeline = "protocol";
  row.dataset = "uniform";
  row.n = n_points;
  row.d = d;
  row.repetitions = repetitions;

  for (int protocol : {1, 2}) {
    std::vector<double> times;
    std::size_t messages = 0;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      std::uint16_t port = 0;
      distnet::Socket listener = distnet::listen_on({"127.0.0.1", 0}, &port);
      std::vector<std::thread> receivers;
      std::vector<std::size_t> received(workers, 0);
      for (std::size_t w = 0; w < workers; ++w) {
        receivers.emplace_back([&, w] {
          distnet::Connection c(distnet::connect_to({"127.0.0.1", port}, 10.0));
          distnet::EntryAssembler asm2(d);
          while (auto m = c.recv(60.0)) {
            if (m->tag == distnet::Tag::data_end) break;
            if (m->tag == distnet::Tag::data_point) {
              distnet::decode_point_p1(*m);
              ++received[w];
            } else if (m->tag == distnet::Tag::data_entry && asm2.add(*m)) {
              ++received[w];
            }
          }
        });
      }
      std::vector<distnet::Connection> conns;
      for (std::size_t w = 0; w < workers; ++w) {
        const int fd = ::accept(listener.fd(), nullptr, nullptr);
        if (fd < 0) throw Error("accept failed");
        conns.emplace_back(distnet::Socket(fd));
      }
      Stopwatch sw;
      for (std::size_t i = 0; i < points.size(); ++i) {
        auto& c = conns[i % workers];
        if (protocol == 1) {
          c.send(distnet::encode_point_p1(points[i]));
        } else {
          for (const auto& m : distnet::encode_point_p2(points[i])) c.send(m);
        }
      }
      for (auto& c : conns) c.send(distnet::make_data_end(0));
      for (auto& t : receivers) t.join();
      times.push_back(sw.elapsed_ms());
      messages = 0;
      for (auto& c : conns) messages += c.messages_sent() - 1;  // exclude DATA_END
      std::size_t got = 0;
      for (auto r : received) got += r;
      if (got != n_points) throw Error("protocol bench lost points");
    }
    if (protocol == 1) {
      row.messages_p1 = messages;
      row.p1_ms = median(times);
    } else {
      row.messages_p2 = messages;
      row.p2_ms = median(times);
    }
  }
  row.total_ms = row.p1_ms + row.p2_ms;
  return row;
}

std::string bench_csv_header() {
  return "pipeline,dataset,n,d,n_clusters,repetitions,cluster_ms,knit_ms,shed_ms,club_ms,train_ms,"
         "route_ms,predict_ms,total_ms,accuracy,partitions,reduced_size,messages_p1,messages_p2,p1_ms,"
         "p2_ms,error";
}

std::string to_csv_line(const BenchRow& r) {
  std::ostringstream os;
  os << csv_escape(r.pipeline) << "," << csv_escape(r.dataset) << "," << r.n << "," << r.d << ","
     << r.n_clusters << "," << r.repetitions << "," << format_double(r.cluster_ms) << ","
     << format_double(r.knit_ms) << "," << format_double(r.shed_ms) << "," << format_double(r.club_ms)
     << "," << format_double(r.train_ms) << "," << format_double(r.route_ms) << ","
     << format_double(r.predict_ms) << "," << format_double(r.total_ms) << ","
     << format_double(r.accuracy) << "," << r.partitions << "," << r.reduced_size << ","
     << r.messages_p1 << "," << r.messages_p2 << "," << format_double(r.p1_ms) << ","
     << format_double(r.p2_ms) << "," << csv_escape(r.error);
  return os.str();
}

BenchRow parse_csv_line(const std::string& line) {
  const auto f = csv_split(line);
  if (f.size() != 22) throw ParseError("bench row has " + std::to_string(f.size()) + " fields, expected 22");
  BenchRow r;
  try {
    std::size_t k = 0;
    r.pipeline = f[k++];
    r.dataset = f[k++];
    r.n = std::stoull(f[k++]);
    r.d = std::stoull(f[k++]);
    r.n_clusters = std::stoull(f[k++]);
    r.repetitions = std::stoull(f[k++]);
    for (double* x : {&r.cluster_ms, &r.knit_ms, &r.shed_ms, &r.club_ms, &r.train_ms, &r.route_ms,
                      &r.predict_ms, &r.total_ms, &r.accuracy})
      *x = std::stod(f[k++]);
    r.partitions = std::stoull(f[k++]);
    r.reduced_size = std::stoull(f[k++]);
    r.messages_p1 = std::stoull(f[k++]);
    r.messages_p2 = std::stoull(f[k++]);
    r.p1_ms = std::stod(f[k++]);
    r.p2_ms = std::stod(f[k++]);
    r.error = f[k++];
  } catch (const std::logic_error&) {
    throw ParseError("bad bench row: " + line);
  }
  return r;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << bench_csv_header() << "\n";
  for (const auto& r : rows) out << to_csv_line(r) << "\n";
}

std::vector<BenchRow> read_bench_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != bench_csv_header()) throw ParseError("unexpected bench CSV header");
  std::vector<BenchRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_csv_line(line));
  return rows;
}

nlohmann::json bench_summary(const std::vector<BenchRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"pipeline", r.pipeline}, {"dataset", r.dataset},     {"n", r.n},
                        {"d", r.d},               {"n_clusters", r.n_clusters},
                        {"heuristic_ms", r.heuristic_ms()},
                        {"train_ms", r.train_ms}, {"route_ms", r.route_ms},   {"predict_ms", r.predict_ms},
                        {"total_ms", r.total_ms}, {"accuracy", r.accuracy},   {"partitions", r.partitions},
                        {"reduced_size", r.reduced_size}};
    if (r.pipeline == "protocol") {
      j["messages_p1"] = r.messages_p1;
      j["messages_p2"] = r.messages_p2;
      j["p1_ms"] = r.p1_ms;
      j["p2_ms"] = r.p2_ms;
    }
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(j);
  }
  return {{"rows", arr}};
}

}  // namespace gheur
