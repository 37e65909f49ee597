#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gheur/distnet/request_queue.hpp"

namespace gheur::distnet {

struct Assignment {
  std::uint64_t worker = 0;
  std::size_t partition = 0;

  bool operator==(const Assignment&) const = default;
};

struct AckRecord {
  std::size_t partition = 0;
  std::uint64_t worker = 0;
  bool ok = true;
};

// Socket-free bookkeeping of the master: which partitions are unsent, which
// are in flight with which worker, and which are acknowledged.
class MasterScheduler {
 public:
  explicit MasterScheduler(std::size_t num_parts);

  void add_worker(std::uint64_t worker);
  bool knows(std::uint64_t worker) const { return workers_.count(worker) != 0; }

  // A worker asking for data while it holds a partition is a protocol error.
  void on_request(std::uint64_t worker, std::uint64_t timestamp);

  // Pairs queued requests with unsent partitions, oldest request first.
  std::vector<Assignment> dispatch();

  void on_done(std::uint64_t worker, std::size_t partition, bool ok);

  // Returns the partition that went back to the unsent pool, if any.
  std::optional<std::size_t> on_disconnect(std::uint64_t worker);

  bool finished() const { return acks_.size() == num_parts_; }
  std::size_t num_parts() const { return num_parts_; }
  std::size_t unsent() const { return unsent_.size(); }
  std::size_t in_flight() const { return in_flight_.size(); }
  std::size_t pending_requests() const { return queue_.size(); }
  const std::vector<AckRecord>& acks() const { return acks_; }
  const std::vector<std::size_t>& send_counts() const { return send_counts_; }
  const std::vector<Assignment>& history() const { return history_; }
  std::vector<std::size_t> failed_partitions() const;

 private:
  std::size_t num_parts_;
  std::deque<std::size_t> unsent_;
  std::map<std::uint64_t, std::size_t> in_flight_;  // worker -> partition
  std::set<std::uint64_t> workers_;
  std::set<std::uint64_t> gone_;
  RequestQueue queue_;
  std::vector<AckRecord> acks_;
  std::vector<char> acked_;
  std::vector<std::size_t> send_counts_;
  std::vector<Assignment> history_;
};

}  // namespace gheur::distnet
