#include "gheur/config.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>

extern char** environ;

namespace gheur {

namespace {

enum class Kind { real, count, integer, boolean, text };

struct Entry {
  std::string key;
  Kind kind;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("expected a non-negative integer, got '" + s + "'");
  }
  if (pos != s.size() || s.front() == '-') throw UsageError("expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw UsageError("expected a boolean, got '" + s + "'");
}

std::string show(double v) { return format_double(v); }
std::string show(std::size_t v) { return std::to_string(v); }
std::string show(int v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }

#define REAL(name, field) \
  Entry { name, Kind::real, [](Config& c, const std::string& v) { c.field = parse_real(v); }, [](const Config& c) { return show(c.field); } }
#define COUNT(name, field) \
  Entry { name, Kind::count, [](Config& c, const std::string& v) { c.field = parse_count(v); }, [](const Config& c) { return show(c.field); } }
#define INTEGER(name, field) \
  Entry { name, Kind::integer, [](Config& c, const std::string& v) { c.field = parse_int(v); }, [](const Config& c) { return show(c.field); } }
#define BOOLEAN(name, field) \
  Entry { name, Kind::boolean, [](Config& c, const std::string& v) { c.field = parse_bool(v); }, [](const Config& c) { return show(c.field); } }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      COUNT("nn", heuristic.nn),
      REAL("reach_scale", heuristic.reach_scale),
      COUNT("max_same_class_neigh", heuristic.max_same_class_neigh),
      COUNT("neigh_limit", heuristic.neigh_limit),
      REAL("ci_init", heuristic.ci_init),
      REAL("ce_init", heuristic.ce_init),
      REAL("ci_reassess", heuristic.ci_reassess),
      REAL("ce_reassess", heuristic.ce_reassess),
      REAL("gs_edge_cut", heuristic.gs_edge_cut),
      REAL("gc_edge_cut", heuristic.gc_edge_cut),
      COUNT("max_coarsen_iters", heuristic.max_coarsen_iters),
      COUNT("ens_iters", heuristic.ens_iters),
      BOOLEAN("stop_on_kink", heuristic.stop_on_kink),
      REAL("kink_theta", heuristic.kink_theta),
      COUNT("n_clusters", heuristic.n_clusters),
      REAL("nominal_vc", heuristic.nominal_vc),
      COUNT("cluster_iters", heuristic.cluster_iters),
      Entry{"seed", Kind::count,
            [](Config& c, const std::string& v) { c.heuristic.seed = parse_count(v); },
            [](const Config& c) { return std::to_string(c.heuristic.seed); }},
      Entry{"search_mode", Kind::text,
            [](Config& c, const std::string& v) {
              if (v == "exact")
                c.heuristic.search_mode = SearchMode::exact;
              else if (v == "approximate")
                c.heuristic.search_mode = SearchMode::approximate;
              else
                throw UsageError("search_mode must be exact or approximate");
            },
            [](const Config& c) {
              return std::string(c.heuristic.search_mode == SearchMode::exact ? "exact" : "approximate");
            }},
      Entry{"kernel", Kind::text,
            [](Config& c, const std::string& v) {
              if (v == "linear")
                c.classifier.kernel.kind = KernelKind::linear;
              else if (v == "polynomial" || v == "poly")
                c.classifier.kernel.kind = KernelKind::polynomial;
              else if (v == "rbf")
                c.classifier.kernel.kind = KernelKind::rbf;
              else
                throw UsageError("kernel must be linear, polynomial or rbf");
            },
            [](const Config& c) {
              switch (c.classifier.kernel.kind) {
                case KernelKind::linear: return std::string("linear");
                case KernelKind::polynomial: return std::string("polynomial");
                case KernelKind::rbf: return std::string("rbf");
              }
              return std::string("linear");
            }},
      REAL("gamma", classifier.kernel.gamma),
      INTEGER("degree", classifier.kernel.degree),
      REAL("coef0", classifier.kernel.coef0),
      REAL("svm_c", classifier.C),
      REAL("tol", classifier.tol),
      COUNT("max_passes", classifier.max_passes),
      COUNT("cache_mb", classifier.cache_mb),
      Entry{"dataset", Kind::text,
            [](Config& c, const std::string& v) {
              if (v != "one" && v != "two") throw UsageError("dataset must be one or two");
              c.dataset = v;
            },
            [](const Config& c) { return c.dataset; }},
      COUNT("n", n),
      COUNT("d", d),
      REAL("margin", margin),
      REAL("radius", radius),
      REAL("noise", noise),
      REAL("shell_width", shell_width),
      REAL("train_fraction", train_fraction),
      Entry{"endpoint", Kind::text, [](Config& c, const std::string& v) { c.endpoint = v; },
            [](const Config& c) { return c.endpoint; }},
      INTEGER("protocol", protocol),
      REAL("timeout", timeout),
      COUNT("workers", workers),
      INTEGER("threads", threads),
  };
  return table;
}

#undef REAL
#undef COUNT
#undef INTEGER
#undef BOOLEAN

const Entry& entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return e;
  throw UsageError("unknown config key '" + key + "'");
}

}  // namespace

double parse_real(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "e") return std::exp(1.0);
  if (s.rfind("e^", 0) == 0) return std::exp(parse_real(s.substr(2)));
  if (s == "inf" || s == "+inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("expected a real number, got '" + raw + "'");
  }
  if (pos != s.size()) throw UsageError("expected a real number, got '" + raw + "'");
  return v;
}

std::string env_name(const std::string& key) {
  std::string out = "GHEUR_";
  for (char c : key) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  const Entry& e = entry(key);
  try {
    e.set(*this, trim(value));
  } catch (const UsageError& err) {
    throw UsageError(key + ": " + err.what());
  }
}

std::string Config::get(const std::string& key) const { return entry(key).get(*this); }

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return k;
}

bool Config::known(const std::string& key) {
  const auto& k = keys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

nlohmann::json Config::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : entries()) {
    const std::string v = e.get(*this);
    switch (e.kind) {
      case Kind::real: {
        const double x = parse_real(v);
        if (std::isfinite(x))
          j[e.key] = x;
        else
          j[e.key] = v;
        break;
      }
      case Kind::count: j[e.key] = parse_count(v); break;
      case Kind::integer: j[e.key] = parse_int(v); break;
      case Kind::boolean: j[e.key] = parse_bool(v); break;
      case Kind::text: j[e.key] = v; break;
    }
  }
  return j;
}

void Config::apply_threads() const {
  if (threads > 0) omp_set_num_threads(threads);
}

std::map<std::string, std::string> gheur_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv(*e);
    if (kv.rfind("GHEUR_", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

Config load_config(const ConfigSources& src) {
  Config c;
  if (src.file) {
    for (const auto& [k, v] : read_config_file(*src.file)) c.set(k, v);
  }
  std::map<std::string, std::string> by_env;
  for (const auto& key : Config::keys()) by_env[env_name(key)] = key;
  for (const auto& [name, v] : src.env) {
    auto it = by_env.find(name);
    if (it == by_env.end()) throw UsageError("unknown environment variable " + name);
    c.set(it->second, v);
  }
  for (const auto& [k, v] : src.overrides) c.set(k, v);
  return c;
}

}  // namespace gheur
