#include "gheur/distnet/wire.hpp"

#include <bit>
#include <cstring>

namespace gheur::distnet {

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::connect_req: return "CONNECT_REQ";
    case Tag::connect_ack: return "CONNECT_ACK";
    case Tag::data_request: return "DATA_REQUEST";
    case Tag::data_begin: return "DATA_BEGIN";
    case Tag::data_point: return "DATA_POINT";
    case Tag::data_entry: return "DATA_ENTRY";
    case Tag::data_end: return "DATA_END";
    case Tag::done_training: return "DONE_TRAINING";
    case Tag::term_train: return "TERM_TRAIN";
  }
  return "UNKNOWN";
}

bool valid_tag(std::uint8_t t) { return t >= 1 && t <= 9; }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void append_frame(std::vector<std::uint8_t>& out, const Message& m) {
  if (m.payload.size() > kMaxPayload) throw ProtocolError("payload too large");
  out.push_back(static_cast<std::uint8_t>(m.tag));
  put_u32(out, static_cast<std::uint32_t>(m.payload.size()));
  out.insert(out.end(), m.payload.begin(), m.payload.end());
}

std::vector<std::uint8_t> encode_frame(const Message& m) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + m.payload.size());
  append_frame(out, m);
  return out;
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  } else if (pos_ > (1u << 16) && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> FrameDecoder::next() {
  if (buffered() < kHeaderBytes) return std::nullopt;
  const std::uint8_t* h = buf_.data() + pos_;
  if (!valid_tag(h[0])) throw ProtocolError("unknown message tag " + std::to_string(h[0]));
  const std::uint32_t len = static_cast<std::uint32_t>(h[1]) | static_cast<std::uint32_t>(h[2]) << 8 |
                            static_cast<std::uint32_t>(h[3]) << 16 | static_cast<std::uint32_t>(h[4]) << 24;
  if (len > kMaxPayload) throw ProtocolError("declared payload length " + std::to_string(len) + " too large");
  if (buffered() < kHeaderBytes + len) return std::nullopt;
  Message m;
  m.tag = static_cast<Tag>(h[0]);
  m.payload.assign(h + kHeaderBytes, h + kHeaderBytes + len);
  pos_ += kHeaderBytes + len;
  return m;
}

void PayloadReader::need(std::size_t n) const {
  if (p_.size() - pos_ < n) throw ProtocolError("truncated payload");
}

std::uint8_t PayloadReader::u8() {
  need(1);
  return p_[pos_++];
}

std::uint32_t PayloadReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(p_[pos_ + k]) << (8 * k);
  pos_ += 4;
  return v;
}

std::uint64_t PayloadReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(p_[pos_ + k]) << (8 * k);
  pos_ += 8;
  return v;
}

double PayloadReader::f64() { return std::bit_cast<double>(u64()); }

std::string PayloadReader::rest() {
  std::string s(p_.begin() + static_cast<std::ptrdiff_t>(pos_), p_.end());
  pos_ = p_.size();
  return s;
}

void PayloadReader::expect_done() const {
  if (!done()) throw ProtocolError("trailing bytes in payload");
}

int target_from_wire(double v) {
  if (v == 1.0) return 1;
  if (v == -1.0) return -1;
  throw ProtocolError("target must be -1 or +1");
}

Message encode_point_p1(const LabeledPoint& p) {
  if (p.features.empty()) throw ProtocolError("empty features");
  Message m{Tag::data_point, {}};
  m.payload.reserve(8 * (p.features.size() + 1));
  for (double v : p.features) put_f64(m.payload, v);
  put_f64(m.payload, static_cast<double>(p.target));
  return m;
}

LabeledPoint decode_point_p1(const Message& m) {
  if (m.tag != Tag::data_point) throw ProtocolError("expected DATA_POINT");
  if (m.payload.size() % 8 != 0 || m.payload.size() < 16) throw ProtocolError("bad DATA_POINT length");
  PayloadReader r(m.payload);
  LabeledPoint p;
  const std::size_t d = m.payload.size() / 8 - 1;
  p.features.resize(d);
  for (auto& v : p.features) v = r.f64();
  p.target = target_from_wire(r.f64());
  return p;
}

std::vector<Message> encode_point_p2(const LabeledPoint& p) {
  if (p.features.empty()) throw ProtocolError("empty features");
  std::vector<Message> out;
  out.reserve(p.features.size() + 1);
  for (double v : p.features) {
    out.push_back({Tag::data_entry, {}});
    put_f64(out.back().payload, v);
  }
  out.push_back({Tag::data_entry, {}});
  put_f64(out.back().payload, static_cast<double>(p.target));
  return out;
}

std::optional<LabeledPoint> EntryAssembler::add(const Message& m) {
  if (m.tag != Tag::data_entry || m.payload.size() != 8) throw ProtocolError("bad DATA_ENTRY");
  PayloadReader r(m.payload);
  const double v = r.f64();
  if (values_.size() < d_) {
    values_.push_back(v);
    return std::nullopt;
  }
  LabeledPoint p{std::move(values_), target_from_wire(v)};
  values_.clear();
  return p;
}

Message make_connect_req(const std::string& identity) {
  if (identity.empty()) throw ProtocolError("empty worker identity");
  return {Tag::connect_req, std::vector<std::uint8_t>(identity.begin(), identity.end())};
}

std::string parse_connect_req(const Message& m) {
  if (m.tag != Tag::connect_req) throw ProtocolError("expected CONNECT_REQ");
  if (m.payload.empty()) throw ProtocolError("empty worker identity");
  return std::string(m.payload.begin(), m.payload.end());
}

Message make_connect_ack(const ConnectAck& a) {
  Message m{Tag::connect_ack, {}};
  m.payload.push_back(a.accepted ? 1 : 0);
  put_u64(m.payload, a.key);
  return m;
}

ConnectAck parse_connect_ack(const Message& m) {
  if (m.tag != Tag::connect_ack) throw ProtocolError("expected CONNECT_ACK");
  PayloadReader r(m.payload);
  ConnectAck a;
  const std::uint8_t s = r.u8();
  if (s > 1) throw ProtocolError("bad CONNECT_ACK status");
  a.accepted = s == 1;
  a.key = r.u64();
  r.expect_done();
  return a;
}

Message make_data_request() { return {Tag::data_request, {}}; }

Message make_data_begin(const DataBegin& b) {
  Message m{Tag::data_begin, {}};
  put_u32(m.payload, b.partition);
  put_u32(m.payload, b.count);
  put_u32(m.payload, b.dim);
  m.payload.push_back(b.protocol);
  return m;
}

DataBegin parse_data_begin(const Message& m) {
  if (m.tag != Tag::data_begin) throw ProtocolError("expected DATA_BEGIN");
  PayloadReader r(m.payload);
  DataBegin b;
  b.partition = r.u32();
  b.count = r.u32();
  b.dim = r.u32();
  b.protocol = r.u8();
  r.expect_done();
  if (b.dim == 0) throw ProtocolError("empty features");
  if (b.protocol != 1 && b.protocol != 2) throw ProtocolError("unknown data protocol");
  return b;
}

Message make_data_end(std::uint32_t partition) {
  Message m{Tag::data_end, {}};
  put_u32(m.payload, partition);
  return m;
}

std::uint32_t parse_data_end(const Message& m) {
  if (m.tag != Tag::data_end) throw ProtocolError("expected DATA_END");
  PayloadReader r(m.payload);
  const auto id = r.u32();
  r.expect_done();
  return id;
}

Message make_done_training(const DoneTraining& d) {
  Message m{Tag::done_training, {}};
  put_u32(m.payload, d.partition);
  m.payload.push_back(d.ok ? 0 : 1);
  return m;
}

DoneTraining parse_done_training(const Message& m) {
  if (m.tag != Tag::done_training) throw ProtocolError("expected DONE_TRAINING");
  PayloadReader r(m.payload);
  DoneTraining d;
  d.partition = r.u32();
  const std::uint8_t s = r.u8();
  if (s > 1) throw ProtocolError("bad DONE_TRAINING status");
  d.ok = s == 0;
  r.expect_done();
  return d;
}

Message make_term_train() { return {Tag::term_train, {}}; }

}  // namespace gheur::distnet
