#include "gheur/distnet/scheduler.hpp"

#include <string>

#include "gheur/common.hpp"

namespace gheur::distnet {

MasterScheduler::MasterScheduler(std::size_t num_parts)
    : num_parts_(num_parts), acked_(num_parts, 0), send_counts_(num_parts, 0) {
  for (std::size_t p = 0; p < num_parts; ++p) unsent_.push_back(p);
}

void MasterScheduler::add_worker(std::uint64_t worker) { workers_.insert(worker); }

void MasterScheduler::on_request(std::uint64_t worker, std::uint64_t timestamp) {
  if (!knows(worker) || gone_.count(worker)) throw ProtocolError("request from unknown worker");
  if (in_flight_.count(worker)) throw ProtocolError("DATA_REQUEST while a partition is in flight");
  if (queue_.contains(worker)) throw ProtocolError("duplicate DATA_REQUEST");
  queue_.push({worker, timestamp});
}

std::vector<Assignment> MasterScheduler::dispatch() {
  std::vector<Assignment> out;
  while (!unsent_.empty() && !queue_.empty()) {
    const Request r = *queue_.pop();
    const std::size_t p = unsent_.front();
    unsent_.pop_front();
    in_flight_[r.worker] = p;
    ++send_counts_[p];
    out.push_back({r.worker, p});
    history_.push_back(out.back());
  }
  return out;
}

void MasterScheduler::on_done(std::uint64_t worker, std::size_t partition, bool ok) {
  if (!knows(worker)) throw ProtocolError("ack from unknown worker");
  auto it = in_flight_.find(worker);
  if (it == in_flight_.end() || it->second != partition)
    throw ProtocolError("ack for partition " + std::to_string(partition) + " that the worker does not hold");
  in_flight_.erase(it);
  acked_[partition] = 1;
  acks_.push_back({partition, worker, ok});
}

std::optional<std::size_t> MasterScheduler::on_disconnect(std::uint64_t worker) {
  gone_.insert(worker);
  queue_.remove(worker);
  auto it = in_flight_.find(worker);
  if (it == in_flight_.end()) return std::nullopt;
  const std::size_t p = it->second;
  in_flight_.erase(it);
  unsent_.push_front(p);
  return p;
}

std::vector<std::size_t> MasterScheduler::failed_partitions() const {
  std::vector<std::size_t> out;
  for (const auto& a : acks_)
    if (!a.ok) out.push_back(a.partition);
  return out;
}

}  // namespace gheur::distnet
