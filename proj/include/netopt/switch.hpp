// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "netopt/common.hpp"
#include "netopt/wire.hpp"

namespace netopt {

struct SwitchConfig {
  int num_workers = 1;
  std::uint32_t window = 256;    // gradient table slots (W)
  int leader_worker = 0;         // heartbeat that triggers aggregate emission

  void validate() const {
    if (num_workers < 1 || num_workers > 64) {
      throw std::invalid_argument("switch num_workers must be in [1, 64]");
    }
    if (window < 1) throw std::invalid_argument("switch window must be >= 1");
    if (leader_worker < 0 || leader_worker >= num_workers) {
      throw std::invalid_argument("leader_worker must be < num_workers");
    }
  }
};

struct SwitchCounters {
  std::uint64_t grad_packets_in = 0;
  std::uint64_t aggregates_emitted = 0;   // includes shadow re-emissions
  std::uint64_t duplicates_absorbed = 0;
  std::uint64_t shadow_reemissions = 0;
  std::uint64_t param_packets_in = 0;
  std::uint64_t heartbeats_in = 0;
  std::uint64_t heartbeats_out = 0;
};

// A packet the switch wants delivered. dst is a worker or the optimizer.
struct SwitchEmission {
  NodeId dst;
  Packet packet;
};

// Raised when a gradient packet falls outside the admissible sequence
// window; that means the credit discipline upstream is broken, so tests
// treat it as fatal.
class WindowViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The switch pipeline: one packet in, zero or more packets out, no timers.
// Gradients are summed per sequence number across workers in a two-pool
// (active + shadow) table; parameters and gradient heartbeats fan out;
// parameter heartbeats are min-aggregated and emitted on the leader's beat.
class SmartSwitch {
 public:
  explicit SmartSwitch(const SwitchConfig& cfg);

  std::vector<SwitchEmission> handle(const Packet& pkt);

  const SwitchCounters& counters() const { return counters_; }
  const SwitchConfig& config() const { return cfg_; }

 private:
  struct Pool {
    bool in_use = false;
    bool emitted = false;
    std::uint32_t seq = 0;
    std::uint64_t bitmap = 0;
    std::vector<std::int32_t> data;
  };

  struct HeartbeatEntry {
    bool seen = false;
    std::uint32_t ack = 0;
    std::uint32_t credit = 0;
  };

  std::vector<SwitchEmission> on_grad_packet(const Packet& pkt);
  std::vector<SwitchEmission> on_param_heartbeat(const Packet& pkt);
  std::vector<SwitchEmission> broadcast_to_workers(const Packet& pkt);

  Pool& pool_for(std::uint32_t seq) {
    const std::uint32_t slot = seq % cfg_.window;
    const std::uint32_t which = (seq / cfg_.window) % 2;
    return pools_[2 * slot + which];
  }

  SwitchConfig cfg_;
  std::uint64_t full_bitmap_;
  std::vector<Pool> pools_;              // 2 per slot
  std::vector<HeartbeatEntry> heart_;    // per worker, param stream
  std::int64_t emitted_high_ = -1;       // highest aggregate seq emitted
  std::uint32_t hb_seq_ = 0;             // aggregate heartbeat counter
  SwitchCounters counters_;
};

}  // namespace netopt
