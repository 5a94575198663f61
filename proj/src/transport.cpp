// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/transport.hpp"

#include <algorithm>

namespace netopt {

TransportEndpoint::TransportEndpoint(const TransportConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  credit_reg_ = cfg_.initial_credit;
  rx_slots_.resize(cfg_.rx_capacity);
  next_heartbeat_ = cfg_.timing.heartbeat_interval;
}

bool TransportEndpoint::tx_offer(std::vector<std::int32_t> payload) {
  if (ring_.size() >= cfg_.tx_ring) return false;
  ring_.push_back(std::move(payload));
  ++next_seq_;
  pump_tx();
  return true;
}

void TransportEndpoint::pump_tx() {
  // First transmission of everything at or below the credit line.
  while (highest_sent_ + 1 < static_cast<std::int64_t>(next_seq_) &&
         highest_sent_ + 1 <= static_cast<std::int64_t>(credit_reg_)) {
    const std::uint32_t seq = static_cast<std::uint32_t>(highest_sent_ + 1);
    const auto& payload = ring_[seq - ack_reg_];
    outputs_.push_back(make_data(cfg_.data_kind, cfg_.self_id, seq, payload));
    ++counters_.data_packets_sent;
    counters_.data_elems_sent += payload.size();
    highest_sent_ = seq;
  }
}

void TransportEndpoint::on_packet(const Packet& pkt) {
  if (pkt.kind == cfg_.rx_heartbeat_kind()) {
    if (pkt.ack > next_seq_) {
      // Acks something we never sent; corrupt or misrouted.
      ++counters_.ignored_packets;
      return;
    }
    // Max rule: stale or reordered heartbeats are no-ops.
    if (pkt.ack > ack_reg_) {
      const std::uint32_t evict = pkt.ack - ack_reg_;
      ring_.erase(ring_.begin(), ring_.begin() + evict);
      ack_reg_ = pkt.ack;
      last_progress_ = now_;
    }
    credit_reg_ = std::max(credit_reg_, pkt.credit);
    pump_tx();
  } else if (pkt.kind == cfg_.rx_data_kind()) {
    rx_deliver(pkt);
  } else {
    ++counters_.ignored_packets;
  }
}

void TransportEndpoint::rx_deliver(const Packet& pkt) {
  const std::uint32_t seq = pkt.seq_num;
  if (seq < expected_seq_) {
    ++counters_.duplicates_dropped;
    return;
  }
  if (static_cast<std::uint64_t>(seq) >=
      static_cast<std::uint64_t>(consume_base_) + cfg_.rx_capacity) {
    // Beyond what we ever advertised; flow control upstream failed or the
    // packet is hostile. Drop and count.
    ++counters_.out_of_window_dropped;
    return;
  }
  auto& slot = rx_slots_[seq % cfg_.rx_capacity];
  if (slot.has_value()) {
    ++counters_.duplicates_dropped;
    return;
  }
  slot = pkt.values;
  ++occupancy_;
  assert(occupancy_ <= cfg_.rx_capacity);
  counters_.max_rx_occupancy = std::max(counters_.max_rx_occupancy, occupancy_);
  while (expected_seq_ < consume_base_ + cfg_.rx_capacity &&
         rx_slots_[expected_seq_ % cfg_.rx_capacity].has_value()) {
    ++expected_seq_;
    ++counters_.payloads_released;
  }
}

std::optional<std::vector<std::int32_t>> TransportEndpoint::rx_pop() {
  if (consume_base_ == expected_seq_) return std::nullopt;
  auto& slot = rx_slots_[consume_base_ % cfg_.rx_capacity];
  assert(slot.has_value());
  std::vector<std::int32_t> payload = std::move(*slot);
  slot.reset();
  --occupancy_;
  ++consume_base_;
  return payload;
}

std::uint32_t TransportEndpoint::rx_credit() const {
  // expected - 1 + free slots; never less than what was already consumed.
  const std::uint32_t free_slots = cfg_.rx_capacity - occupancy_;
  return expected_seq_ - 1 + free_slots;
}

void TransportEndpoint::emit_heartbeat() {
  outputs_.push_back(make_heartbeat(cfg_.tx_heartbeat_kind(), cfg_.self_id,
                                    hb_seq_++, expected_seq_, rx_credit()));
  ++counters_.heartbeats_sent;
}

void TransportEndpoint::on_tick(Tick now) {
  now_ = std::max(now_, now);
  while (now_ >= next_heartbeat_) {
    emit_heartbeat();
    next_heartbeat_ += cfg_.timing.heartbeat_interval;
  }
  const Tick resend_after = cfg_.timing.loss_detect_period +
                            cfg_.stagger_index * cfg_.timing.resend_stagger_unit;
  if (!ring_.empty() && now_ - last_progress_ >= resend_after) {
    // Go-back-N: everything from the cumulative ack up to the credit line.
    const std::int64_t hi =
        std::min<std::int64_t>(highest_sent_, credit_reg_);
    for (std::int64_t seq = ack_reg_; seq <= hi; ++seq) {
      const auto& payload = ring_[static_cast<std::size_t>(seq - ack_reg_)];
      outputs_.push_back(make_data(cfg_.data_kind, cfg_.self_id,
                                   static_cast<std::uint32_t>(seq), payload));
      ++counters_.retransmissions;
      counters_.retransmit_elems += payload.size();
    }
    last_progress_ = now_;
  }
}

Tick TransportEndpoint::next_due() const {
  Tick due = next_heartbeat_;
  if (!ring_.empty()) {
    const Tick resend_at = last_progress_ + cfg_.timing.loss_detect_period +
                           cfg_.stagger_index * cfg_.timing.resend_stagger_unit;
    due = std::min(due, resend_at);
  }
  return due;
}

}  // namespace netopt
