#include "gheur/distnet/worker_table.hpp"

#include <algorithm>
#include <cstring>

#include "gheur/common.hpp"

namespace gheur::distnet {

std::uint64_t worker_key(const std::string& identity) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : identity) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string WorkerSlot::identity_string() const { return std::string(identity.data()); }

bool WorkerTable::insert(std::uint64_t key, int fd, const std::string& identity) {
  if (find(key) != nullptr) return false;
  if (size_ >= kCapacity) throw Error("worker table full");
  std::size_t i = key % kCapacity;
  while (marks_[i] == Mark::used) i = (i + 1) % kCapacity;
  WorkerSlot& s = slots_[i];
  s = WorkerSlot{};
  s.key = key;
  s.fd = fd;
  const std::size_t n = std::min(identity.size(), s.identity.size() - 1);
  std::memcpy(s.identity.data(), identity.data(), n);
  marks_[i] = Mark::used;
  ++size_;
  return true;
}

const WorkerSlot* WorkerTable::find(std::uint64_t key) const {
  std::size_t i = key % kCapacity;
  for (std::size_t probe = 0; probe < kCapacity; ++probe) {
    if (marks_[i] == Mark::empty) return nullptr;
    if (marks_[i] == Mark::used && slots_[i].key == key) return &slots_[i];
    i = (i + 1) % kCapacity;
  }
  return nullptr;
}

WorkerSlot* WorkerTable::find(std::uint64_t key) {
  return const_cast<WorkerSlot*>(static_cast<const WorkerTable*>(this)->find(key));
}

bool WorkerTable::erase(std::uint64_t key) {
  WorkerSlot* s = find(key);
  if (s == nullptr) return false;
  marks_[static_cast<std::size_t>(s - slots_.data())] = Mark::deleted;
  --size_;
  return true;
}

void WorkerTable::for_each(const std::function<void(WorkerSlot&)>& fn) {
  for (std::size_t i = 0; i < kCapacity; ++i)
    if (marks_[i] == Mark::used) fn(slots_[i]);
}

void WorkerTable::for_each(const std::function<void(const WorkerSlot&)>& fn) const {
  for (std::size_t i = 0; i < kCapacity; ++i)
    if (marks_[i] == Mark::used) fn(slots_[i]);
}

}  // namespace gheur::distnet
