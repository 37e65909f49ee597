#pragma once

// Framing: 1-byte tag, 4-byte little-endian payload length, payload. Numbers
// inside payloads are little-endian; doubles are IEEE-754 binary64.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gheur/data.hpp"

namespace gheur::distnet {

enum class Tag : std::uint8_t {
  connect_req = 1,
  connect_ack = 2,
  data_request = 3,
  data_begin = 4,
  data_point = 5,
  data_entry = 6,
  data_end = 7,
  done_training = 8,
  term_train = 9,
};

const char* tag_name(Tag t);
bool valid_tag(std::uint8_t t);

constexpr std::size_t kHeaderBytes = 5;
// Upper bound on a declared payload; larger lengths are treated as corruption.
constexpr std::uint32_t kMaxPayload = 1u << 24;

struct Message {
  Tag tag = Tag::data_request;
  std::vector<std::uint8_t> payload;

  bool operator==(const Message&) const = default;
};

void append_frame(std::vector<std::uint8_t>& out, const Message& m);
std::vector<std::uint8_t> encode_frame(const Message& m);

// Incremental decoder for a byte stream. Throws ProtocolError on unknown tags
// or oversized lengths; a partial frame simply waits for more bytes.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<Message> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

// Little-endian payload builders and readers.
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f64(std::vector<std::uint8_t>& out, double v);

class PayloadReader {
 public:
  explicit PayloadReader(std::span<const std::uint8_t> p) : p_(p) {}
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string rest();
  bool done() const { return pos_ == p_.size(); }
  void expect_done() const;

 private:
  void need(std::size_t n) const;
  std::span<const std::uint8_t> p_;
  std::size_t pos_ = 0;
};

// Protocol 1: one DATA_POINT carrying every feature and then the target.
Message encode_point_p1(const LabeledPoint& p);
LabeledPoint decode_point_p1(const Message& m);

// Protocol 2: one DATA_ENTRY per feature and one for the target.
std::vector<Message> encode_point_p2(const LabeledPoint& p);

// Reassembles protocol-2 entries; `d` features are expected before the target.
class EntryAssembler {
 public:
  explicit EntryAssembler(std::size_t d) : d_(d) {}
  // Returns a point once its target entry has arrived.
  std::optional<LabeledPoint> add(const Message& m);

 private:
  std::size_t d_;
  std::vector<double> values_;
};

struct DataBegin {
  std::uint32_t partition = 0;
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
  std::uint8_t protocol = 1;
};

struct DoneTraining {
  std::uint32_t partition = 0;
  bool ok = true;
};

struct ConnectAck {
  bool accepted = false;
  std::uint64_t key = 0;
};

Message make_connect_req(const std::string& identity);
std::string parse_connect_req(const Message& m);
Message make_connect_ack(const ConnectAck& a);
ConnectAck parse_connect_ack(const Message& m);
Message make_data_request();
Message make_data_begin(const DataBegin& b);
DataBegin parse_data_begin(const Message& m);
Message make_data_end(std::uint32_t partition);
std::uint32_t parse_data_end(const Message& m);
Message make_done_training(const DoneTraining& d);
DoneTraining parse_done_training(const Message& m);
Message make_term_train();

// A point's target as carried on the wire; only -1 and +1 are accepted.
int target_from_wire(double v);

}  // namespace gheur::distnet
