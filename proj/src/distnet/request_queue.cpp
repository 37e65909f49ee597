#include "gheur/distnet/request_queue.hpp"

namespace gheur::distnet {

std::optional<Request> RequestQueue::pop() {
  if (q_.empty()) return std::nullopt;
  auto it = q_.begin();
  Request r{std::get<1>(*it), std::get<0>(*it)};
  q_.erase(it);
  return r;
}

bool RequestQueue::contains(std::uint64_t worker) const {
  for (const auto& e : q_)
    if (std::get<1>(e) == worker) return true;
  return false;
}

std::size_t RequestQueue::remove(std::uint64_t worker) {
  std::size_t n = 0;
  for (auto it = q_.begin(); it != q_.end();) {
    if (std::get<1>(*it) == worker) {
      it = q_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

}  // namespace gheur::distnet
