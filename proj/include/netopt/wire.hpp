// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "netopt/common.hpp"

namespace netopt {

// Wire layout (all multi-byte fields big-endian):
//
//   offset  size  field
//   0       2     magic (0x4E4F)
//   2       1     kind
//   3       1     worker_id (0xFF = optimizer endpoint)
//   4       4     seq_num
//   8       2     payload_len (element count; 0 for heartbeats)
//   10      ...   payload
//
// Data packets carry payload_len big-endian int32 values (10 + 4*n bytes
// total). Heartbeat packets carry ack then credit, 4 bytes each (18 bytes
// total), and always have payload_len = 0.
inline constexpr std::uint16_t kWireMagic = 0x4E4F;
inline constexpr std::size_t kHeaderBytes = 10;
inline constexpr std::size_t kHeartbeatBytes = kHeaderBytes + 8;

// Per-packet element budget for data packets. Fixed for a deployment,
// configurable through RunConfig (wire.elems_per_packet).
inline constexpr std::uint16_t kDefaultElemsPerPacket = 64;

enum class PacketKind : std::uint8_t {
  ParamData = 0,
  GradData = 1,
  ParamHeartbeat = 2,
  GradHeartbeat = 3,
};

inline bool is_data_kind(PacketKind k) {
  return k == PacketKind::ParamData || k == PacketKind::GradData;
}
inline bool is_heartbeat_kind(PacketKind k) { return !is_data_kind(k); }

// Direction of the stream a packet belongs to. Parameters flow
// optimizer -> workers; gradients flow workers -> optimizer. Heartbeats
// travel opposite to their stream's data.
enum class StreamDir : std::uint8_t { ParamStream = 0, GradStream = 1 };

inline StreamDir stream_of(PacketKind k) {
  return (k == PacketKind::ParamData || k == PacketKind::ParamHeartbeat)
             ? StreamDir::ParamStream
             : StreamDir::GradStream;
}

// Stream label for per-round accounting and traces. Sequence numbers
// themselves run continuously over the life of a stream; the round is
// bookkeeping, not a wire field.
struct StreamId {
  StreamDir direction = StreamDir::ParamStream;
  std::uint32_t round = 0;
  bool operator==(const StreamId&) const = default;
};

struct Packet {
  PacketKind kind = PacketKind::ParamData;
  std::uint8_t worker_id = kOptimizerId;
  std::uint32_t seq_num = 0;
  std::vector<std::int32_t> values;  // data kinds only
  std::uint32_t ack = 0;             // heartbeat kinds only
  std::uint32_t credit = 0;          // heartbeat kinds only

  bool operator==(const Packet&) const = default;
};

inline Packet make_data(PacketKind kind, std::uint8_t worker_id,
                        std::uint32_t seq, std::vector<std::int32_t> values) {
  Packet p;
  p.kind = kind;
  p.worker_id = worker_id;
  p.seq_num = seq;
  p.values = std::move(values);
  return p;
}

inline Packet make_heartbeat(PacketKind kind, std::uint8_t worker_id,
                             std::uint32_t seq, std::uint32_t ack,
                             std::uint32_t credit) {
  Packet p;
  p.kind = kind;
  p.worker_id = worker_id;
  p.seq_num = seq;
  p.ack = ack;
  p.credit = credit;
  return p;
}

// Encoded size without materializing bytes; the simulator uses this for
// byte accounting.
inline std::size_t encoded_size(const Packet& p) {
  return is_data_kind(p.kind) ? kHeaderBytes + 4 * p.values.size()
                              : kHeartbeatBytes;
}

// Thrown by encode() when a packet violates its own invariants
// (heartbeat with payload, oversized payload). Programming error, not a
// wire condition.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Distinct decode failures so the fabric can count malformed traffic.
enum class DecodeError : std::uint8_t {
  ok = 0,
  bad_magic,
  truncated,
  unknown_kind,
  malformed,  // field values inconsistent (heartbeat with payload, trailing bytes)
};

const char* to_string(DecodeError e);

std::vector<std::uint8_t> encode(const Packet& p);
DecodeError decode(std::span<const std::uint8_t> bytes, Packet& out);

}  // namespace netopt
