#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gheur/distnet/wire.hpp"

namespace gheur::distnet {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;

  std::string str() const { return host + ":" + std::to_string(port); }
};

// "host:port"; an empty host means 127.0.0.1.
Endpoint parse_endpoint(const std::string& s);

// GHEUR_ENDPOINT when set, otherwise `fallback`.
std::string endpoint_from_env(const std::string& fallback);

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    const int f = fd_;
    fd_ = -1;
    return f;
  }
  void close();

 private:
  int fd_ = -1;
};

// Listening socket; port 0 binds an ephemeral port.
Socket listen_on(const Endpoint& ep, std::uint16_t* bound_port = nullptr);

// Retries until the master accepts or the timeout expires.
Socket connect_to(const Endpoint& ep, double timeout_s);

// Address of the local end of a connected socket as "host:port".
std::string local_address(int fd);

void write_all(int fd, const std::uint8_t* data, std::size_t n);

// One framed connection.
class Connection {
 public:
  explicit Connection(Socket s) : sock_(std::move(s)) {}

  int fd() const { return sock_.fd(); }
  void send(const Message& m);
  void send_bytes(const std::vector<std::uint8_t>& bytes) { write_all(fd(), bytes.data(), bytes.size()); }

  // Blocks for the next message. Returns nullopt when the peer closed the
  // connection; throws TimeoutError after timeout_s without a full message.
  std::optional<Message> recv(double timeout_s);

  // Reads what is available without blocking past one read. False on EOF.
  bool pump();
  std::optional<Message> next() { return decoder_.next(); }

  std::size_t messages_sent() const { return messages_sent_; }
  std::size_t bytes_sent() const { return bytes_sent_; }
  void close() { sock_.close(); }

 private:
  Socket sock_;
  FrameDecoder decoder_;
  std::size_t messages_sent_ = 0;
  std::size_t bytes_sent_ = 0;
};

}  // namespace gheur::distnet
