#include "gheur/distnet/master.hpp"

#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace gheur::distnet {

struct Master::Peer {
  explicit Peer(Socket s) : conn(std::move(s)) {}
  Connection conn;
  bool gone = false;
};

namespace {

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                        std::chrono::steady_clock::now().time_since_epoch())
                                        .count());
}

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

}  // namespace

Master::Master(const std::string& endpoint) : endpoint_(parse_endpoint(endpoint)) {
  std::uint16_t port = 0;
  listener_ = listen_on(endpoint_, &port);
  endpoint_.port = port;
}

Master::~Master() = default;

ConnectReport Master::connect_phase(std::size_t expected, double timeout_s) {
  if (expected > WorkerTable::kCapacity) throw Error("more workers than the worker table holds");
  ConnectReport rep;
  Stopwatch sw;
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(timeout_s));
  std::vector<std::unique_ptr<Peer>> pending;

  while (table_.size() < expected) {
    std::vector<pollfd> fds{{listener_.fd(), POLLIN, 0}};
    for (auto& p : pending) fds.push_back({p->conn.fd(), POLLIN, 0});
    const int wait = remaining_ms(deadline);
    if (wait == 0) {
      std::string names;
      for (const auto& id : rep.identities) names += (names.empty() ? "" : ", ") + id;
      throw TimeoutError("connect phase timed out: " + std::to_string(expected - table_.size()) + " of " +
                         std::to_string(expected) + " workers missing (registered: " +
                         (names.empty() ? "none" : names) + ")");
    }
    const int rc = ::poll(fds.data(), fds.size(), wait);
    if (rc < 0 && errno != EINTR) throw Error(std::string("poll: ") + std::strerror(errno));
    if (rc <= 0) continue;

    if (fds[0].revents & POLLIN) {
      const int fd = ::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
      if (fd >= 0) {
        const int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        pending.push_back(std::make_unique<Peer>(Socket(fd)));
      }
    }
    for (std::size_t k = 1; k < fds.size(); ++k) {
      if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      Peer& peer = *pending[k - 1];
      if (!peer.conn.pump()) {
        peer.gone = true;
        continue;
      }
      if (auto m = peer.conn.next()) {
        const std::string identity = parse_connect_req(*m);
        const std::uint64_t key = worker_key(identity);
        if (table_.insert(key, peer.conn.fd(), identity)) {
          peer.conn.send(make_connect_ack({true, key}));
          rep.identities.push_back(identity);
          peers_[key] = std::move(pending[k - 1]);
        } else {
          peer.conn.send(make_connect_ack({false, key}));
          ++rep.rejected;
          peer.gone = true;
        }
      }
    }
    std::erase_if(pending, [](const std::unique_ptr<Peer>& p) { return !p || p->gone; });
  }
  rep.elapsed_ms = sw.elapsed_ms();
  return rep;
}

void Master::send_partition(Peer& peer, const Dataset& ds, const Partition& part, std::uint32_t id,
                            int protocol, ServeLog& log) {
  const std::size_t before_msgs = peer.conn.messages_sent();
  const std::size_t before_bytes = peer.conn.bytes_sent();
  peer.conn.send(make_data_begin({id, static_cast<std::uint32_t>(part.point_ids.size()),
                                  static_cast<std::uint32_t>(ds.dim()), static_cast<std::uint8_t>(protocol)}));
  for (auto pid : part.point_ids) {
    const LabeledPoint p = ds.point(pid);
    if (protocol == 1) {
      peer.conn.send(encode_point_p1(p));
    } else {
      for (const auto& m : encode_point_p2(p)) peer.conn.send(m);
    }
  }
  peer.conn.send(make_data_end(id));
  log.messages_sent += peer.conn.messages_sent() - before_msgs;
  log.bytes_sent += peer.conn.bytes_sent() - before_bytes;
}

ServeLog Master::serve(const Dataset& ds, const PartitionSet& parts, double timeout_s, int protocol) {
  if (parts.partitions.empty()) throw Error("no partitions to serve");
  if (protocol != 1 && protocol != 2) throw Error("protocol must be 1 or 2");
  if (ds.dim() == 0) throw ProtocolError("empty features");
  ServeLog log;
  Stopwatch sw;
  MasterScheduler sched(parts.size());
  for (auto& [key, peer] : peers_) sched.add_worker(key);

  auto drop = [&](std::uint64_t key) {
    Peer& peer = *peers_.at(key);
    if (peer.gone) return;
    peer.gone = true;
    peer.conn.close();
    if (auto* slot = table_.find(key)) slot->state = WorkerState::gone;
    if (sched.on_disconnect(key)) ++log.requeued;
  };

  auto handle = [&](std::uint64_t key, Peer& peer) {
    while (auto m = peer.conn.next()) {
      switch (m->tag) {
        case Tag::data_request:
          sched.on_request(key, now_ns());
          if (auto* slot = table_.find(key)) slot->state = WorkerState::idle;
          break;
        case Tag::done_training: {
          const DoneTraining d = parse_done_training(*m);
          sched.on_done(key, d.partition, d.ok);
          break;
        }
        default:
          throw ProtocolError(std::string("unexpected ") + tag_name(m->tag) + " from worker");
      }
    }
  };
  // Frames that arrived together with CONNECT_REQ.
  for (auto& [key, peer] : peers_) handle(key, *peer);

  while (!sched.finished()) {
    for (const Assignment& a : sched.dispatch()) {
      Peer& peer = *peers_.at(a.worker);
      if (auto* slot = table_.find(a.worker)) slot->state = WorkerState::busy;
      log.assignments.push_back(a);
      try {
        send_partition(peer, ds, parts.partitions[a.partition], static_cast<std::uint32_t>(a.partition),
                       protocol, log);
      } catch (const Error&) {
        drop(a.worker);
      }
    }
    if (sched.finished()) break;

    std::vector<pollfd> fds;
    std::vector<std::uint64_t> keys;
    for (auto& [key, peer] : peers_) {
      if (peer->gone) continue;
      fds.push_back({peer->conn.fd(), POLLIN, 0});
      keys.push_back(key);
    }
    if (fds.empty() && !peers_.empty())
      throw Error("all workers disconnected with " + std::to_string(parts.size() - sched.acks().size()) +
                  " partitions unacknowledged");
    const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(timeout_s * 1000.0));
    if (rc < 0 && errno != EINTR) throw Error(std::string("poll: ") + std::strerror(errno));
    if (rc == 0)
      throw TimeoutError("no worker activity for " + std::to_string(timeout_s) + " s with " +
                         std::to_string(parts.size() - sched.acks().size()) + " partitions outstanding");

    for (std::size_t k = 0; k < fds.size(); ++k) {
      if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const std::uint64_t key = keys[k];
      Peer& peer = *peers_.at(key);
      if (!peer.conn.pump()) {
        drop(key);
        continue;
      }
      handle(key, peer);
    }

  }

  for (auto& [key, peer] : peers_) {
    if (peer->gone) continue;
    try {
      peer->conn.send(make_term_train());
      ++log.term_sent;
      ++log.messages_sent;
    } catch (const Error&) {
    }
    if (auto* slot = table_.find(key)) slot->state = WorkerState::done;
  }
  log.acks = sched.acks();
  log.send_counts = sched.send_counts();
  log.failed = sched.failed_partitions();
  log.elapsed_ms = sw.elapsed_ms();
  return log;
}

}  // namespace gheur::distnet
