// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/wire.hpp"

#include <limits>

namespace netopt {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

}  // namespace

const char* to_string(DecodeError e) {
  switch (e) {
    case DecodeError::ok:           return "ok";
    case DecodeError::bad_magic:    return "bad_magic";
    case DecodeError::truncated:    return "truncated";
    case DecodeError::unknown_kind: return "unknown_kind";
    case DecodeError::malformed:    return "malformed";
  }
  return "?";
}

std::vector<std::uint8_t> encode(const Packet& p) {
  if (is_heartbeat_kind(p.kind) && !p.values.empty()) {
    throw InvariantViolation("heartbeat packet carries a data payload");
  }
  if (p.values.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw InvariantViolation("payload exceeds the 16-bit length field");
  }

  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(p));
  put_u16(out, kWireMagic);
  out.push_back(static_cast<std::uint8_t>(p.kind));
  out.push_back(p.worker_id);
  put_u32(out, p.seq_num);
  put_u16(out, static_cast<std::uint16_t>(p.values.size()));
  if (is_data_kind(p.kind)) {
    for (std::int32_t v : p.values) {
      put_u32(out, static_cast<std::uint32_t>(v));
    }
  } else {
    put_u32(out, p.ack);
    put_u32(out, p.credit);
  }
  return out;
}

DecodeError decode(std::span<const std::uint8_t> bytes, Packet& out) {
  if (bytes.size() < kHeaderBytes) return DecodeError::truncated;
  if (get_u16(bytes.data()) != kWireMagic) return DecodeError::bad_magic;
  const std::uint8_t kind_byte = bytes[2];
  if (kind_byte > 3) return DecodeError::unknown_kind;

  Packet p;
  p.kind = static_cast<PacketKind>(kind_byte);
  p.worker_id = bytes[3];
  p.seq_num = get_u32(bytes.data() + 4);
  const std::uint16_t payload_len = get_u16(bytes.data() + 8);

  if (is_heartbeat_kind(p.kind)) {
    if (payload_len != 0) return DecodeError::malformed;
    if (bytes.size() < kHeartbeatBytes) return DecodeError::truncated;
    if (bytes.size() > kHeartbeatBytes) return DecodeError::malformed;
    p.ack = get_u32(bytes.data() + 10);
    p.credit = get_u32(bytes.data() + 14);
  } else {
    const std::size_t want = kHeaderBytes + 4u * payload_len;
    if (bytes.size() < want) return DecodeError::truncated;
    if (bytes.size() > want) return DecodeError::malformed;
    p.values.resize(payload_len);
    for (std::size_t i = 0; i < payload_len; ++i) {
      p.values[i] =
          static_cast<std::int32_t>(get_u32(bytes.data() + kHeaderBytes + 4 * i));
    }
  }
  out = std::move(p);
  return DecodeError::ok;
}

}  // namespace netopt
