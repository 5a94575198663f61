// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "netopt/common.hpp"
#include "netopt/wire.hpp"

namespace netopt {

// Timing defaults. The heartbeat interval is T_send/4 where T_send is the
// time to burn a full credit window at line rate (1 tick per packet), so
// the sender learns the receiver's state well before the window runs out.
struct TransportTiming {
  Tick heartbeat_interval = 64;
  Tick loss_detect_period = 2000;
  Tick resend_stagger_unit = 4;

  static TransportTiming from_window(std::uint32_t window, int hb_divisor,
                                     Tick loss_detect, Tick stagger) {
    TransportTiming t;
    t.heartbeat_interval =
        std::max<Tick>(1, static_cast<Tick>(window) / std::max(1, hb_divisor));
    t.loss_detect_period = loss_detect;
    t.resend_stagger_unit = stagger;
    return t;
  }
};

struct TransportConfig {
  std::uint8_t self_id = 0;          // worker index, or kOptimizerId
  PacketKind data_kind = PacketKind::GradData;  // what the TX half sends
  std::uint32_t tx_ring = 256;       // accepted-but-unacked payload capacity
  std::uint32_t rx_capacity = 256;   // C
  std::uint32_t initial_credit = 255;  // peer RX capacity - 1, known statically
  int stagger_index = 0;             // worker id; 0 for the optimizer side
  TransportTiming timing;

  // Derived packet kinds.
  PacketKind rx_data_kind() const {
    return data_kind == PacketKind::GradData ? PacketKind::ParamData
                                             : PacketKind::GradData;
  }
  // Heartbeat this endpoint emits (describes its own RX stream).
  PacketKind tx_heartbeat_kind() const {
    return data_kind == PacketKind::GradData ? PacketKind::ParamHeartbeat
                                             : PacketKind::GradHeartbeat;
  }
  // Heartbeat this endpoint consumes (acks for its TX stream).
  PacketKind rx_heartbeat_kind() const {
    return data_kind == PacketKind::GradData ? PacketKind::GradHeartbeat
                                             : PacketKind::ParamHeartbeat;
  }

  void validate() const {
    if (tx_ring < 1 || rx_capacity < 1) {
      throw std::invalid_argument("transport rings must hold at least 1 slot");
    }
    if (!is_data_kind(data_kind)) {
      throw std::invalid_argument("transport data_kind must be a data kind");
    }
  }
};

struct TransportCounters {
  std::uint64_t data_packets_sent = 0;   // first transmissions
  std::uint64_t data_elems_sent = 0;     // first transmissions
  std::uint64_t retransmissions = 0;     // packets
  std::uint64_t retransmit_elems = 0;
  std::uint64_t heartbeats_sent = 0;
  std::uint64_t duplicates_dropped = 0;
  std::uint64_t out_of_window_dropped = 0;
  std::uint64_t ignored_packets = 0;
  std::uint64_t payloads_released = 0;
  std::uint32_t max_rx_occupancy = 0;
};

// One side of the reliable channel: a go-back-N TX half with credit gating
// and a cumulative-ack RX half that releases payloads in order. Entry
// points must be serialized by the owner; emitted packets accumulate until
// take_outputs().
class TransportEndpoint {
 public:
  explicit TransportEndpoint(const TransportConfig& cfg);

  // Application offers a payload for transmission. False means the ring is
  // full; backpressure, not an error.
  bool tx_offer(std::vector<std::int32_t> payload);

  // Fabric delivers a packet (data for our RX, or a heartbeat for our TX).
  void on_packet(const Packet& pkt);

  // Fabric clock. Emits due heartbeats and runs loss detection.
  void on_tick(Tick now);

  // Earliest tick at which on_tick has work to do.
  Tick next_due() const;

  // In-order consumption; nullopt when nothing is releasable. Consuming
  // frees RX space and thereby raises the advertised credit.
  std::optional<std::vector<std::int32_t>> rx_pop();
  std::size_t rx_releasable() const { return expected_seq_ - consume_base_; }

  std::vector<Packet> take_outputs() {
    std::vector<Packet> out;
    out.swap(outputs_);
    return out;
  }
  bool has_outputs() const { return !outputs_.empty(); }

  // TX introspection.
  std::uint32_t next_seq() const { return next_seq_; }
  std::uint32_t ack_reg() const { return ack_reg_; }
  std::uint32_t credit_reg() const { return credit_reg_; }
  std::size_t tx_in_flight() const { return ring_.size(); }
  bool tx_idle() const { return ring_.empty(); }

  // RX introspection.
  std::uint32_t rx_expected() const { return expected_seq_; }
  std::uint32_t rx_credit() const;
  std::uint32_t rx_occupancy() const { return occupancy_; }

  const TransportCounters& counters() const { return counters_; }
  const TransportConfig& config() const { return cfg_; }

 private:
  void pump_tx();
  void rx_deliver(const Packet& pkt);
  void emit_heartbeat();

  TransportConfig cfg_;

  // TX half.
  std::deque<std::vector<std::int32_t>> ring_;  // seqs [ack_reg_, next_seq_)
  std::uint32_t next_seq_ = 0;
  std::uint32_t ack_reg_ = 0;
  std::uint32_t credit_reg_ = 0;
  std::int64_t highest_sent_ = -1;
  Tick last_progress_ = 0;

  // RX half.
  std::vector<std::optional<std::vector<std::int32_t>>> rx_slots_;
  std::uint32_t consume_base_ = 0;   // next seq the consumer takes
  std::uint32_t expected_seq_ = 0;   // next in-order seq from the wire (Ack)
  std::uint32_t occupancy_ = 0;

  Tick now_ = 0;
  Tick next_heartbeat_ = 0;
  std::uint32_t hb_seq_ = 0;
  std::vector<Packet> outputs_;
  TransportCounters counters_;
};

}  // namespace netopt
