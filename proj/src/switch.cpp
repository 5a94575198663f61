// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/switch.hpp"

#include <algorithm>
#include <string>

namespace netopt {

SmartSwitch::SmartSwitch(const SwitchConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  full_bitmap_ = cfg_.num_workers == 64
                     ? ~0ULL
                     : ((1ULL << cfg_.num_workers) - 1);
  pools_.resize(2 * cfg_.window);
  heart_.resize(cfg_.num_workers);
}

std::vector<SwitchEmission> SmartSwitch::handle(const Packet& pkt) {
  switch (pkt.kind) {
    case PacketKind::GradData:
      return on_grad_packet(pkt);
    case PacketKind::ParamData:
      ++counters_.param_packets_in;
      return broadcast_to_workers(pkt);
    case PacketKind::ParamHeartbeat:
      return on_param_heartbeat(pkt);
    case PacketKind::GradHeartbeat:
      ++counters_.heartbeats_in;
      counters_.heartbeats_out += cfg_.num_workers;
      return broadcast_to_workers(pkt);
  }
  return {};
}

std::vector<SwitchEmission> SmartSwitch::on_grad_packet(const Packet& pkt) {
  ++counters_.grad_packets_in;
  if (pkt.worker_id >= cfg_.num_workers) {
    throw std::invalid_argument("gradient packet from unknown worker " +
                                std::to_string(pkt.worker_id));
  }
  const std::int64_t seq = pkt.seq_num;
  const std::int64_t lo = emitted_high_ + 1 - 2 * std::int64_t{cfg_.window};
  const std::int64_t hi = emitted_high_ + cfg_.window;
  if (seq < lo || seq > hi) {
    throw WindowViolation("gradient seq " + std::to_string(seq) +
                          " outside admissible window [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
  }

  Pool& pool = pool_for(pkt.seq_num);
  if (!pool.in_use || pool.seq != pkt.seq_num) {
    if (pool.in_use && pkt.seq_num < pool.seq) {
      // Older than the shadow this pool still holds; flow control is
      // supposed to make this impossible.
      throw WindowViolation("gradient seq " + std::to_string(seq) +
                            " older than pool shadow " +
                            std::to_string(pool.seq));
    }
    // Recycle for the new cycle: a freshly active pool starts from zero
    // contributions.
    pool.in_use = true;
    pool.emitted = false;
    pool.seq = pkt.seq_num;
    pool.bitmap = 0;
    pool.data.assign(pkt.values.size(), 0);
  }

  if (pool.emitted) {
    // This sequence already aggregated and forwarded; answer the
    // retransmission with the identical shadow copy.
    ++counters_.duplicates_absorbed;
    ++counters_.shadow_reemissions;
    ++counters_.aggregates_emitted;
    return {{NodeId::optimizer(),
             make_data(PacketKind::GradData, kOptimizerId, pool.seq,
                       pool.data)}};
  }

  const std::uint64_t bit = 1ULL << pkt.worker_id;
  if (pool.bitmap & bit) {
    ++counters_.duplicates_absorbed;
    return {};
  }
  if (pool.data.size() != pkt.values.size()) {
    throw std::invalid_argument("gradient payload length mismatch at seq " +
                                std::to_string(seq));
  }
  for (std::size_t i = 0; i < pkt.values.size(); ++i) {
    // Wrapping 32-bit add; quantization clamps upstream so a genuine sum
    // never wraps.
    pool.data[i] = static_cast<std::int32_t>(
        static_cast<std::uint32_t>(pool.data[i]) +
        static_cast<std::uint32_t>(pkt.values[i]));
  }
  pool.bitmap |= bit;

  if (pool.bitmap == full_bitmap_) {
    pool.emitted = true;
    emitted_high_ = std::max(emitted_high_, seq);
    ++counters_.aggregates_emitted;
    return {{NodeId::optimizer(),
             make_data(PacketKind::GradData, kOptimizerId, pool.seq,
                       pool.data)}};
  }
  return {};
}

std::vector<SwitchEmission> SmartSwitch::on_param_heartbeat(const Packet& pkt) {
  ++counters_.heartbeats_in;
  if (pkt.worker_id >= cfg_.num_workers) {
    throw std::invalid_argument("param heartbeat from unknown worker " +
                                std::to_string(pkt.worker_id));
  }
  HeartbeatEntry& e = heart_[pkt.worker_id];
  e.seen = true;
  e.ack = pkt.ack;
  e.credit = pkt.credit;

  if (pkt.worker_id != cfg_.leader_worker) return {};
  for (const HeartbeatEntry& h : heart_) {
    if (!h.seen) return {};  // min over a partial table would overstate credit
  }
  std::uint32_t min_ack = heart_[0].ack;
  std::uint32_t min_credit = heart_[0].credit;
  for (const HeartbeatEntry& h : heart_) {
    min_ack = std::min(min_ack, h.ack);
    min_credit = std::min(min_credit, h.credit);
  }
  ++counters_.heartbeats_out;
  return {{NodeId::optimizer(),
           make_heartbeat(PacketKind::ParamHeartbeat, kOptimizerId, hb_seq_++,
                          min_ack, min_credit)}};
}

std::vector<SwitchEmission> SmartSwitch::broadcast_to_workers(
    const Packet& pkt) {
  std::vector<SwitchEmission> out;
  out.reserve(cfg_.num_workers);
  for (int i = 0; i < cfg_.num_workers; ++i) {
    out.push_back({NodeId::worker(static_cast<std::uint8_t>(i)), pkt});
  }
  return out;
}

}  // namespace netopt
