#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <tuple>

namespace gheur::distnet {

struct Request {
  std::uint64_t worker = 0;
  std::uint64_t timestamp = 0;  // arrival time, any monotone unit

  bool operator==(const Request&) const = default;
};

// Round-robin service order: arrival time first, worker key on equal stamps.
class RequestQueue {
 public:
  void push(const Request& r) { q_.emplace(r.timestamp, r.worker, seq_++); }
  std::optional<Request> pop();
  std::size_t size() const { return q_.size(); }
  bool empty() const { return q_.empty(); }
  bool contains(std::uint64_t worker) const;
  // Drops every pending request of a worker; returns how many were removed.
  std::size_t remove(std::uint64_t worker);

 private:
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> q_;
  std::uint64_t seq_ = 0;
};

}  // namespace gheur::distnet
