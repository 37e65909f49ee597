#include "gheur/distnet/worker.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>

#include "gheur/distnet/socket.hpp"

namespace gheur::distnet {

std::filesystem::path model_path(const std::filesystem::path& dir, std::size_t partition) {
  return dir / ("part-" + std::to_string(partition) + ".model");
}

namespace {

Message expect(Connection& conn, double timeout_s) {
  auto m = conn.recv(timeout_s);
  if (!m) throw ProtocolError("master closed the connection");
  return *m;
}

}  // namespace

WorkerReport worker_loop(const WorkerOptions& opt) {
  WorkerReport rep;
  Connection conn(connect_to(parse_endpoint(opt.endpoint), opt.timeout_s));
  const std::string identity =
      opt.identity.empty() ? local_address(conn.fd()) + ":" + std::to_string(::getpid()) : opt.identity;
  conn.send(make_connect_req(identity));
  const ConnectAck ack = parse_connect_ack(expect(conn, opt.timeout_s));
  if (!ack.accepted) throw Error("master rejected worker identity '" + identity + "'");
  rep.key = ack.key;
  std::filesystem::create_directories(opt.model_dir);

  while (true) {
    conn.send(make_data_request());
    const Message m = expect(conn, opt.timeout_s);
    if (m.tag == Tag::term_train) {
      rep.terminated = true;
      break;
    }
    if (m.tag != Tag::data_begin) throw ProtocolError(std::string("unexpected ") + tag_name(m.tag));
    const DataBegin b = parse_data_begin(m);

    Dataset ds(b.dim);
    ds.reserve(b.count);
    EntryAssembler assembler(b.dim);
    while (true) {
      const Message d = expect(conn, opt.timeout_s);
      if (d.tag == Tag::data_end) {
        if (parse_data_end(d) != b.partition) throw ProtocolError("DATA_END for another partition");
        break;
      }
      if (b.protocol == 1) {
        const LabeledPoint p = decode_point_p1(d);
        if (p.features.size() != b.dim) throw ProtocolError("DATA_POINT dimension mismatch");
        ds.add(p);
      } else if (auto p = assembler.add(d)) {
        ds.add(*p);
      }
      if (opt.crash_after_points >= 0 && rep.partitions.empty() &&
          static_cast<long>(ds.size()) >= opt.crash_after_points) {
        conn.close();
        rep.crashed = true;
        return rep;
      }
    }
    if (ds.size() != b.count) throw ProtocolError("partition point count mismatch");

    bool ok = true;
    Stopwatch sw;
    try {
      save_model(train_or_constant(ds, opt.spec), model_path(opt.model_dir, b.partition));
    } catch (const Error& e) {
      std::fprintf(stderr, "worker: partition %u failed: %s\n", b.partition, e.what());
      ok = false;
    }
    rep.train_ms += sw.elapsed_ms();
    (ok ? rep.partitions : rep.failed).push_back(b.partition);
    conn.send(make_done_training({b.partition, ok}));
  }
  return rep;
}

std::vector<pid_t> spawn_local_workers(const WorkerOptions& options, std::size_t count) {
  std::vector<pid_t> pids;
  std::fflush(nullptr);
  for (std::size_t w = 0; w < count; ++w) {
    const pid_t pid = ::fork();
    if (pid < 0) throw Error("fork failed");
    if (pid == 0) {
      int code = 0;
      try {
        WorkerOptions o = options;
        o.spec.exec = Exec::serial;
        const WorkerReport r = worker_loop(o);
        code = r.terminated || r.crashed ? 0 : 3;
      } catch (const std::exception& e) {
        std::fprintf(stderr, "worker: %s\n", e.what());
        code = 2;
      }
      std::fflush(nullptr);
      ::_exit(code);
    }
    pids.push_back(pid);
  }
  return pids;
}

std::size_t wait_workers(const std::vector<pid_t>& pids) {
  std::size_t bad = 0;
  for (pid_t pid : pids) {
    int status = 0;
    if (::waitpid(pid, &status, 0) < 0 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) ++bad;
  }
  return bad;
}

}  // namespace gheur::distnet
