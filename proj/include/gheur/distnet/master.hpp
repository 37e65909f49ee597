#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gheur/clubbing.hpp"
#include "gheur/data.hpp"
#include "gheur/distnet/scheduler.hpp"
#include "gheur/distnet/socket.hpp"
#include "gheur/distnet/worker_table.hpp"

namespace gheur::distnet {

struct ConnectReport {
  std::vector<std::string> identities;  // registration order
  std::size_t rejected = 0;             // duplicate keys NACKed
  double elapsed_ms = 0.0;
};

struct ServeLog {
  std::vector<AckRecord> acks;
  std::vector<Assignment> assignments;      // every DATA_BEGIN, in send order
  std::vector<std::size_t> send_counts;     // per partition
  std::vector<std::size_t> failed;          // partitions acknowledged with the failure flag
  std::size_t requeued = 0;
  std::size_t term_sent = 0;
  std::size_t messages_sent = 0;
  std::size_t bytes_sent = 0;
  double elapsed_ms = 0.0;

  std::size_t data_begin_count() const { return assignments.size(); }
};

// Master side of the protocol: a listening socket, the worker table and a
// single poll() loop over all worker connections.
class Master {
 public:
  explicit Master(const std::string& endpoint);
  ~Master();

  // Actual endpoint, with the port resolved when 0 was requested.
  std::string endpoint() const { return endpoint_.str(); }

  // Accepts connections until `expected` workers have registered.
  ConnectReport connect_phase(std::size_t expected, double timeout_s);

  // Hands out every partition of `parts`, drawn from `ds`, then broadcasts
  // TERM_TRAIN. timeout_s bounds the wait for any single event.
  ServeLog serve(const Dataset& ds, const PartitionSet& parts, double timeout_s, int protocol = 1);

  const WorkerTable& table() const { return table_; }

 private:
  struct Peer;
  void send_partition(Peer& peer, const Dataset& ds, const Partition& part, std::uint32_t id,
                      int protocol, ServeLog& log);

  Endpoint endpoint_;
  Socket listener_;
  WorkerTable table_;
  std::map<std::uint64_t, std::unique_ptr<Peer>> peers_;
};

}  // namespace gheur::distnet
