#pragma once

#include <sys/types.h>

#include <filesystem>
#include <string>
#include <vector>

#include "gheur/svm.hpp"

namespace gheur::distnet {

struct WorkerOptions {
  std::string endpoint;
  ClassifierSpec spec;
  std::filesystem::path model_dir = ".";
  double timeout_s = 60.0;
  // Defaults to "host:port:pid" of the local end of the connection.
  std::string identity;
  // Test hook: drop the connection after this many points of the first
  // partition have arrived. Negative disables it.
  long crash_after_points = -1;
};

struct WorkerReport {
  std::uint64_t key = 0;
  std::vector<std::uint32_t> partitions;  // trained, in order
  std::vector<std::uint32_t> failed;
  bool terminated = false;
  bool crashed = false;
  double train_ms = 0.0;
};

std::filesystem::path model_path(const std::filesystem::path& dir, std::size_t partition);

// Request, receive, train, persist and acknowledge until TERM_TRAIN.
WorkerReport worker_loop(const WorkerOptions& options);

// Forks `count` processes that each run worker_loop and exit. The children
// train with the serial kernels. Returns the child pids.
std::vector<pid_t> spawn_local_workers(const WorkerOptions& options, std::size_t count);

// Waits for every pid; returns the number of children that did not exit 0.
std::size_t wait_workers(const std::vector<pid_t>& pids);

}  // namespace gheur::distnet
