#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

namespace gheur::distnet {

// 64-bit FNV-1a of a worker identity string ("host:port:pid").
std::uint64_t worker_key(const std::string& identity);

enum class WorkerState : std::uint8_t { connected, idle, busy, done, gone };

struct WorkerSlot {
  std::uint64_t key = 0;
  int fd = -1;
  WorkerState state = WorkerState::connected;
  std::array<char, 64> identity{};  // truncated, NUL-terminated

  std::string identity_string() const;
};

// Fixed-capacity open-addressing table with linear probing. Sized for fewer
// than 100 workers; the footprint is fixed and a few kilobytes.
class WorkerTable {
 public:
  static constexpr std::size_t kCapacity = 128;

  // False when the key is already present. Throws when the table is full.
  bool insert(std::uint64_t key, int fd, const std::string& identity);
  WorkerSlot* find(std::uint64_t key);
  const WorkerSlot* find(std::uint64_t key) const;
  bool erase(std::uint64_t key);

  std::size_t size() const { return size_; }
  static constexpr std::size_t memory_bytes() { return sizeof(WorkerTable); }

  void for_each(const std::function<void(WorkerSlot&)>& fn);
  void for_each(const std::function<void(const WorkerSlot&)>& fn) const;

 private:
  enum class Mark : std::uint8_t { empty, used, deleted };
  std::array<WorkerSlot, kCapacity> slots_{};
  std::array<Mark, kCapacity> marks_{};
  std::size_t size_ = 0;
};

}  // namespace gheur::distnet
