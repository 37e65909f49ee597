#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gheur/knitting.hpp"
#include "gheur/svm.hpp"

namespace gheur {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Effective settings of one CLI run. Sources, lowest precedence first: a
// `key = value` file, GHEUR_<KEY> environment variables, command-line flags.
struct Config {
  HeuristicParams heuristic;
  ClassifierSpec classifier;

  std::string dataset = "one";  // generator: one | two
  std::size_t n = 30000;
  std::size_t d = 2;
  double margin = 0.02;
  double radius = 0.2;
  double noise = 0.1;
  double shell_width = 0.02;
  double train_fraction = 0.25;

  std::string endpoint = "127.0.0.1:7878";
  int protocol = 1;
  double timeout = 60.0;
  std::size_t workers = 2;
  int threads = 0;  // 0 keeps the OpenMP default

  // Throws UsageError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();
  static bool known(const std::string& key);

  nlohmann::json to_json() const;
  void apply_threads() const;
};

// Real number; accepts "e^X" for exp(X), "e" and +-inf.
double parse_real(const std::string& s);

std::string env_name(const std::string& key);

struct ConfigSources {
  std::optional<std::filesystem::path> file;
  std::map<std::string, std::string> env;        // GHEUR_* variables
  std::map<std::string, std::string> overrides;  // from flags
};

// GHEUR_* variables of the current process.
std::map<std::string, std::string> gheur_environment();

Config load_config(const ConfigSources& sources);

// Parses a `key = value` file with `#` comments.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

}  // namespace gheur
