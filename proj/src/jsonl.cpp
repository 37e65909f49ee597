#include "gheur/jsonl.hpp"

#include <algorithm>
#include <fstream>

#include "gheur/data.hpp"

namespace gheur {

namespace {

const Json& require(const Json& rec, const char* key, const std::filesystem::path& path) {
  auto it = rec.find(key);
  if (it == rec.end())
    throw ParseError(path.string() + ": record missing \"" + key + "\"");
  return *it;
}

std::string type_of(const Json& rec) {
  auto it = rec.find("type");
  return it != rec.end() && it->is_string() ? it->get<std::string>() : std::string();
}

}  // namespace

JsonlFile read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  JsonlFile f;
  f.config = Json::object();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ": parse error at line " + std::to_string(lineno));
    }
    if (type_of(rec) == "config")
      f.config = rec;
    else
      f.records.push_back(std::move(rec));
  }
  return f;
}

void write_jsonl(const std::filesystem::path& path, const Json& config, const std::vector<Json>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  Json head = config.is_object() ? config : Json::object();
  head["type"] = "config";
  out << head.dump() << "\n";
  for (const auto& r : records) out << r.dump() << "\n";
  if (!out) throw Error("write failed for " + path.string());
}

void write_clustering(const std::filesystem::path& path, const ClusteringResult& c, const Json& config) {
  std::vector<Json> recs;
  recs.push_back({{"type", "clustering"},
                  {"n_points", c.assignment.size()},
                  {"dim", c.dim},
                  {"iterations_run", c.iterations_run},
                  {"inertia_history", c.inertia_history}});
  for (const auto& cl : c.clusters)
    recs.push_back({{"type", "cluster"},
                    {"id", cl.id},
                    {"center", cl.center},
                    {"tc", cl.tc},
                    {"members", cl.members}});
  write_jsonl(path, config, recs);
}

ClusteringResult read_clustering(const std::filesystem::path& path) {
  const JsonlFile f = read_jsonl(path);
  ClusteringResult c;
  bool have_header = false;
  for (const auto& rec : f.records) {
    const std::string t = type_of(rec);
    if (t == "clustering") {
      have_header = true;
      c.assignment.assign(require(rec, "n_points", path).get<std::size_t>(), 0);
      c.dim = require(rec, "dim", path).get<std::size_t>();
      c.iterations_run = require(rec, "iterations_run", path).get<std::size_t>();
      c.inertia_history = require(rec, "inertia_history", path).get<std::vector<double>>();
    } else if (t == "cluster") {
      Cluster cl;
      cl.id = require(rec, "id", path).get<std::size_t>();
      cl.center = require(rec, "center", path).get<std::vector<double>>();
      cl.tc = require(rec, "tc", path).get<double>();
      cl.members = require(rec, "members", path).get<std::vector<std::size_t>>();
      if (cl.id != c.clusters.size()) throw ParseError(path.string() + ": cluster ids out of order");
      c.clusters.push_back(std::move(cl));
    }
  }
  if (!have_header) throw ParseError(path.string() + ": not a clustering file");
  for (const auto& cl : c.clusters)
    for (auto m : cl.members) {
      if (m >= c.assignment.size()) throw ParseError(path.string() + ": member id out of range");
      c.assignment[m] = cl.id;
    }
  return c;
}

void write_graph(const std::filesystem::path& path, const PatternGraph& g, const Json& config) {
  std::vector<Json> recs;
  recs.push_back({{"type", "graph"}, {"nodes", g.node_count()}, {"edges", g.edge_count()}});
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto& n = g.nodes[i];
    recs.push_back({{"type", "node"},
                    {"id", i},
                    {"cluster_id", n.cluster_id},
                    {"center", n.center},
                    {"tc", n.tc},
                    {"size", n.size},
                    {"active", g.active[i] != 0},
                    {"reach", i < g.reach.size() ? g.reach[i] : 0.0}});
  }
  for (const auto& e : g.edges()) recs.push_back({{"type", "edge"}, {"u", e.u}, {"v", e.v}, {"w", e.weight}});
  write_jsonl(path, config, recs);
}

PatternGraph read_graph(const std::filesystem::path& path) {
  const JsonlFile f = read_jsonl(path);
  PatternGraph g;
  std::vector<WeightedEdge> edges;
  bool have_header = false;
  for (const auto& rec : f.records) {
    const std::string t = type_of(rec);
    if (t == "graph") {
      have_header = true;
    } else if (t == "node") {
      if (require(rec, "id", path).get<std::size_t>() != g.nodes.size())
        throw ParseError(path.string() + ": node ids out of order");
      GraphNode n;
      n.cluster_id = require(rec, "cluster_id", path).get<std::size_t>();
      n.center = require(rec, "center", path).get<std::vector<double>>();
      n.tc = require(rec, "tc", path).get<double>();
      n.size = require(rec, "size", path).get<std::size_t>();
      g.nodes.push_back(std::move(n));
      g.active.push_back(require(rec, "active", path).get<bool>() ? 1 : 0);
      g.reach.push_back(require(rec, "reach", path).get<double>());
    } else if (t == "edge") {
      edges.push_back({require(rec, "u", path).get<std::size_t>(), require(rec, "v", path).get<std::size_t>(),
                       require(rec, "w", path).get<double>()});
    }
  }
  if (!have_header) throw ParseError(path.string() + ": not a graph file");
  const std::size_t n = g.nodes.size();
  g.adjacency.assign(n, {});
  g.neigh_list.assign(n, {});
  g.neigh_finished.assign(n, 1);
  g.no_tot_neigh.assign(n, 0);
  g.no_same_class_neigh.assign(n, 0);
  g.node_neigh.assign(n, 0);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n || e.u == e.v) throw ParseError(path.string() + ": bad edge");
    g.adjacency[e.u].push_back({e.v, e.weight});
    g.adjacency[e.v].push_back({e.u, e.weight});
  }
  for (auto& a : g.adjacency)
    std::sort(a.begin(), a.end(), [](const Edge& x, const Edge& y) { return x.to < y.to; });
  for (std::size_t i = 0; i < n; ++i) g.class_space[g.node_class(i) > 0 ? 1 : 0].push_back(i);
  return g;
}

void write_relevant(const std::filesystem::path& path, const RelevantSet& r, const Json& config) {
  write_jsonl(path, config,
              {{{"type", "relevant"},
                {"cluster_ids", r.cluster_ids},
                {"point_ids", r.point_ids},
                {"per_class_counts", r.per_class_counts}}});
}

RelevantSet read_relevant(const std::filesystem::path& path) {
  const JsonlFile f = read_jsonl(path);
  for (const auto& rec : f.records) {
    if (type_of(rec) != "relevant") continue;
    RelevantSet r;
    r.cluster_ids = require(rec, "cluster_ids", path).get<std::vector<std::size_t>>();
    r.point_ids = require(rec, "point_ids", path).get<std::vector<std::size_t>>();
    r.per_class_counts = require(rec, "per_class_counts", path).get<std::array<std::size_t, 2>>();
    return r;
  }
  throw ParseError(path.string() + ": not a relevant-set file");
}

void write_partitions(const std::filesystem::path& path, const PartitionSet& parts,
                      const ClusteringResult& clustering, const Json& config) {
  std::vector<Json> recs;
  for (const auto& p : parts.partitions) {
    Json centers = Json::array();
    for (auto c : p.cluster_ids) centers.push_back(clustering.clusters.at(c).center);
    recs.push_back({{"type", "partition"},
                    {"id", p.id},
                    {"cluster_ids", p.cluster_ids},
                    {"centers", centers},
                    {"class_counts", p.class_counts},
                    {"point_ids", p.point_ids}});
  }
  write_jsonl(path, config, recs);
}

PartitionFile read_partitions(const std::filesystem::path& path) {
  const JsonlFile f = read_jsonl(path);
  PartitionFile out;
  for (const auto& rec : f.records) {
    if (type_of(rec) != "partition") continue;
    Partition p;
    p.id = require(rec, "id", path).get<std::size_t>();
    if (p.id != out.parts.partitions.size()) throw ParseError(path.string() + ": partition ids out of order");
    p.cluster_ids = require(rec, "cluster_ids", path).get<std::vector<std::size_t>>();
    p.point_ids = require(rec, "point_ids", path).get<std::vector<std::size_t>>();
    p.class_counts = require(rec, "class_counts", path).get<std::array<std::size_t, 2>>();
    const auto centers = require(rec, "centers", path).get<std::vector<std::vector<double>>>();
    if (centers.size() != p.cluster_ids.size())
      throw ParseError(path.string() + ": centers do not match cluster ids");
    for (std::size_t k = 0; k < centers.size(); ++k)
      out.router_entries.push_back({p.cluster_ids[k], p.id, centers[k]});
    out.parts.partitions.push_back(std::move(p));
  }
  if (out.parts.partitions.empty()) throw ParseError(path.string() + ": no partitions");
  return out;
}

void write_cost_csv(const std::filesystem::path& path, const ClubResult& r, const Json& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "iteration,cost,candidates,matched_pairs\n";
  for (std::size_t i = 0; i < r.cost_history.size(); ++i) {
    out << i << "," << format_double(r.cost_history[i]) << ",";
    if (i < r.candidate_counts.size()) out << r.candidate_counts[i];
    out << ",";
    if (i < r.matching_sizes.size()) out << r.matching_sizes[i];
    out << "\n";
  }
  if (!out) throw Error("write failed for " + path.string());
  write_config_sidecar(path, config);
}

void write_config_sidecar(const std::filesystem::path& path, const Json& config) {
  std::filesystem::path side = path;
  side += ".config.json";
  std::ofstream out(side);
  if (!out) throw Error("cannot write " + side.string());
  out << config.dump(2) << "\n";
}

}  // namespace gheur
