/** Copyright 2026 The graphroute Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "graphroute/wire.hpp"

#include <bit>
#include <algorithm>
#include <type_traits>
#include <variant>

namespace graphroute::wire {

void Encoder::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void Encoder::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void Encoder::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Encoder::varint(std::uint64_t v) {
  while (v >= 0x80) {
    buf_.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  buf_.push_back(static_cast<std::uint8_t>(v));
}

void Encoder::str(std::string_view s) {
  varint(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void Decoder::need(std::size_t n) const {
  if (buf_.size() - pos_ < n) throw ProtocolError("truncated payload");
}

std::uint8_t Decoder::u8() {
  need(1);
  return buf_[pos_++];
}

std::uint32_t Decoder::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | buf_[pos_++];
  return v;
}

std::uint64_t Decoder::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | buf_[pos_++];
  return v;
}

double Decoder::f64() { return std::bit_cast<double>(u64()); }

std::uint64_t Decoder::varint() {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const std::uint8_t b = u8();
    if (shift == 63 && b > 1) throw ProtocolError("varint overflow");
    v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
    if ((b & 0x80) == 0) return v;
  }
  throw ProtocolError("varint too long");
}

std::string Decoder::str() {
  const std::uint64_t n = varint();
  need(n);
  std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
  pos_ += n;
  return s;
}

void Decoder::finish() const {
  if (!done()) throw ProtocolError("trailing bytes in payload");
}

namespace {

bool known_op(std::uint8_t op) {
  switch (static_cast<Op>(op)) {
    case Op::kGetAdj:
    case Op::kUpdate:
    case Op::kQuery:
    case Op::kError:
    case Op::kAdjResp:
    case Op::kUpdateAck:
    case Op::kAck: return true;
  }
  return false;
}

void put_neighbors(Encoder& e, const std::vector<Neighbor>& ns) {
  e.varint(ns.size());
  for (const auto& n : ns) {
    e.u64(n.id);
    e.str(n.label);
  }
}

std::vector<Neighbor> get_neighbors(Decoder& d) {
  const std::uint64_t count = d.varint();
  std::vector<Neighbor> ns;
  // Each neighbor needs at least 9 bytes; guards against absurd counts.
  ns.reserve(std::min<std::uint64_t>(count, 1u << 16));
  for (std::uint64_t i = 0; i < count; ++i) {
    Neighbor n;
    n.id = d.u64();
    n.label = d.str();
    ns.push_back(std::move(n));
  }
  return ns;
}

enum class UpdateKind : std::uint8_t { kAddNode = 1, kAddEdge = 2, kRemoveEdge = 3, kRemoveNode = 4 };

}  // namespace

std::vector<std::uint8_t> encode_frame(Op op, std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayload) throw ProtocolError("payload too large");
  Encoder e;
  e.u32(static_cast<std::uint32_t>(payload.size()));
  e.u8(static_cast<std::uint8_t>(op));
  auto& b = e.bytes();
  b.insert(b.end(), payload.begin(), payload.end());
  return std::move(b);
}

std::optional<Frame> decode_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  if (bytes.size() < kHeaderBytes) return std::nullopt;
  Decoder d(bytes.first(kHeaderBytes));
  const std::uint32_t len = d.u32();
  const std::uint8_t op = d.u8();
  if (len > kMaxPayload) throw ProtocolError("frame length " + std::to_string(len) + " too large");
  if (!known_op(op)) throw ProtocolError("unknown opcode " + std::to_string(op));
  if (bytes.size() - kHeaderBytes < len) return std::nullopt;
  Frame f;
  f.op = static_cast<Op>(op);
  f.payload.assign(bytes.begin() + kHeaderBytes, bytes.begin() + kHeaderBytes + len);
  consumed = kHeaderBytes + len;
  return f;
}

std::vector<std::uint8_t> encode_get_adj(NodeId id) {
  Encoder e;
  e.u64(id);
  return std::move(e.bytes());
}

NodeId decode_get_adj(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  const NodeId id = d.u64();
  d.finish();
  return id;
}

std::vector<std::uint8_t> encode_adjacency(const AdjacencyEntry& a) {
  Encoder e;
  e.u64(a.node);
  e.str(a.label);
  put_neighbors(e, a.out);
  put_neighbors(e, a.in);
  return std::move(e.bytes());
}

AdjacencyEntry decode_adjacency(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  AdjacencyEntry a;
  a.node = d.u64();
  a.label = d.str();
  a.out = get_neighbors(d);
  a.in = get_neighbors(d);
  d.finish();
  return a;
}

std::vector<std::uint8_t> encode_update(const GraphUpdate& u) {
  Encoder e;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AddNode>) {
          e.u8(static_cast<std::uint8_t>(UpdateKind::kAddNode));
          e.u64(x.id);
          e.str(x.label);
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          e.u8(static_cast<std::uint8_t>(UpdateKind::kAddEdge));
          e.u64(x.src);
          e.u64(x.dst);
          e.str(x.label);
        } else if constexpr (std::is_same_v<T, RemoveEdge>) {
          e.u8(static_cast<std::uint8_t>(UpdateKind::kRemoveEdge));
          e.u64(x.src);
          e.u64(x.dst);
          e.str("");
        } else {
          e.u8(static_cast<std::uint8_t>(UpdateKind::kRemoveNode));
          e.u64(x.id);
          e.str("");
        }
      },
      u);
  return std::move(e.bytes());
}

GraphUpdate decode_update(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  const auto kind = static_cast<UpdateKind>(d.u8());
  GraphUpdate u;
  switch (kind) {
    case UpdateKind::kAddNode: {
      AddNode x{d.u64(), {}};
      x.label = d.str();
      u = std::move(x);
      break;
    }
    case UpdateKind::kAddEdge: {
      AddEdge x;
      x.src = d.u64();
      x.dst = d.u64();
      x.label = d.str();
      u = std::move(x);
      break;
    }
    case UpdateKind::kRemoveEdge: {
      RemoveEdge x;
      x.src = d.u64();
      x.dst = d.u64();
      d.str();
      u = x;
      break;
    }
    case UpdateKind::kRemoveNode: {
      RemoveNode x{d.u64()};
      d.str();
      u = x;
      break;
    }
    default: throw ProtocolError("unknown update kind");
  }
  d.finish();
  return u;
}

std::vector<std::uint8_t> encode_update_ack(std::span<const NodeId> affected) {
  Encoder e;
  e.varint(affected.size());
  for (NodeId id : affected) e.u64(id);
  return std::move(e.bytes());
}

std::vector<NodeId> decode_update_ack(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  const std::uint64_t n = d.varint();
  std::vector<NodeId> ids;
  for (std::uint64_t i = 0; i < n; ++i) ids.push_back(d.u64());
  d.finish();
  return ids;
}

std::vector<std::uint8_t> encode_error(ErrorCode code, std::string_view message) {
  Encoder e;
  e.u8(static_cast<std::uint8_t>(code));
  e.str(message);
  return std::move(e.bytes());
}

ErrorMessage decode_error(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  ErrorMessage m;
  const std::uint8_t c = d.u8();
  if (c < 1 || c > 3) throw ProtocolError("unknown error code");
  m.code = static_cast<ErrorCode>(c);
  m.message = d.str();
  d.finish();
  return m;
}

namespace {
constexpr std::uint8_t kHasTarget = 0x01;
constexpr std::uint8_t kHasLabel = 0x02;
}  // namespace

std::vector<std::uint8_t> encode_query(const Query& q) {
  Encoder e;
  e.u64(q.id);
  e.u8(static_cast<std::uint8_t>(q.kind));
  const std::uint8_t flags = (q.target ? kHasTarget : 0) | (q.label_filter ? kHasLabel : 0);
  e.u8(flags);
  e.u64(q.source);
  if (q.target) e.u64(*q.target);
  e.u32(q.h);
  e.u64(q.seed);
  e.f64(q.restart_prob);
  if (q.label_filter) e.str(*q.label_filter);
  return std::move(e.bytes());
}

Query decode_query(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  Query q;
  q.id = d.u64();
  const std::uint8_t kind = d.u8();
  if (kind < 1 || kind > 3) throw ProtocolError("unknown query kind");
  q.kind = static_cast<QueryKind>(kind);
  const std::uint8_t flags = d.u8();
  if (flags & ~(kHasTarget | kHasLabel)) throw ProtocolError("unknown query flags");
  q.source = d.u64();
  if (flags & kHasTarget) q.target = d.u64();
  q.h = d.u32();
  q.seed = d.u64();
  q.restart_prob = d.f64();
  if (flags & kHasLabel) q.label_filter = d.str();
  d.finish();
  return q;
}

std::vector<std::uint8_t> encode_ack(const QueryResult& r) {
  Encoder e;
  e.u64(r.query_id);
  e.u8(static_cast<std::uint8_t>(r.kind));
  switch (r.kind) {
    case QueryKind::kAggregation: e.u64(r.count); break;
    case QueryKind::kRandomWalk:
      e.u64(r.terminal);
      e.varint(r.visits.size());
      for (const auto& [id, c] : r.visits) {
        e.u64(id);
        e.varint(c);
      }
      break;
    case QueryKind::kReachability: e.u8(r.reachable ? 1 : 0); break;
  }
  e.varint(r.cache_hits);
  e.varint(r.cache_misses);
  e.varint(r.edges_scanned);
  e.varint(r.misses_by_server.size());
  for (auto m : r.misses_by_server) e.varint(m);
  e.u64(r.elapsed_us);
  return std::move(e.bytes());
}

QueryResult decode_ack(std::span<const std::uint8_t> payload) {
  Decoder d(payload);
  QueryResult r;
  r.query_id = d.u64();
  const std::uint8_t kind = d.u8();
  if (kind < 1 || kind > 3) throw ProtocolError("unknown query kind");
  r.kind = static_cast<QueryKind>(kind);
  switch (r.kind) {
    case QueryKind::kAggregation: r.count = d.u64(); break;
    case QueryKind::kRandomWalk: {
      r.terminal = d.u64();
      const std::uint64_t n = d.varint();
      for (std::uint64_t i = 0; i < n; ++i) {
        const NodeId id = d.u64();
        r.visits.emplace_back(id, static_cast<std::uint32_t>(d.varint()));
      }
      break;
    }
    case QueryKind::kReachability: {
      const std::uint8_t b = d.u8();
      if (b > 1) throw ProtocolError("bad reachability flag");
      r.reachable = b == 1;
      break;
    }
  }
  r.cache_hits = d.varint();
  r.cache_misses = d.varint();
  r.edges_scanned = d.varint();
  const std::uint64_t s = d.varint();
  for (std::uint64_t i = 0; i < s; ++i) {
    r.misses_by_server.push_back(static_cast<std::uint32_t>(d.varint()));
  }
  r.elapsed_us = d.u64();
  d.finish();
  return r;
}

}  // namespace graphroute::wire
