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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphroute/graph.hpp"
#include "graphroute/query.hpp"

// Length-prefixed binary frames shared by the storage and processor tiers.
// Layout: u32 big-endian payload length | u8 opcode | payload. All fixed-width
// integers are big-endian; varints are unsigned LEB128. docs/wire-format.md
// has the per-opcode byte layout.
namespace graphroute::wire {

enum class Op : std::uint8_t {
  kGetAdj = 0x01,
  kUpdate = 0x02,
  kQuery = 0x10,
  kError = 0x7F,
  kAdjResp = 0x81,
  kUpdateAck = 0x82,
  kAck = 0x90,
};

enum class ErrorCode : std::uint8_t {
  kNotFound = 1,
  kBadRequest = 2,
  kInternal = 3,
};

inline constexpr std::size_t kHeaderBytes = 5;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

// Malformed bytes on the wire.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class Encoder {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void varint(std::uint64_t v);
  void str(std::string_view s);  // varint length + bytes

  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> bytes) : buf_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::uint64_t varint();
  std::string str();

  bool done() const noexcept { return pos_ == buf_.size(); }
  // Throws ProtocolError when bytes are left over.
  void finish() const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

struct Frame {
  Op op = Op::kError;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(Op op, std::span<const std::uint8_t> payload);

// Decodes one frame from the front of `bytes`. Returns nullopt when more
// bytes are needed; `consumed` is set on success. Throws ProtocolError on an
// oversized length or unknown opcode.
std::optional<Frame> decode_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed);

// Payload codecs. decode_* consume the whole payload or throw ProtocolError.
std::vector<std::uint8_t> encode_get_adj(NodeId id);
NodeId decode_get_adj(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_adjacency(const AdjacencyEntry& e);
AdjacencyEntry decode_adjacency(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_update(const GraphUpdate& u);
GraphUpdate decode_update(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_update_ack(std::span<const NodeId> affected);
std::vector<NodeId> decode_update_ack(std::span<const std::uint8_t> payload);

struct ErrorMessage {
  ErrorCode code = ErrorCode::kInternal;
  std::string message;
};
std::vector<std::uint8_t> encode_error(ErrorCode code, std::string_view message);
ErrorMessage decode_error(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_query(const Query& q);
Query decode_query(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_ack(const QueryResult& r);
QueryResult decode_ack(std::span<const std::uint8_t> payload);

}  // namespace graphroute::wire
