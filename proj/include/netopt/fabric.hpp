// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "netopt/common.hpp"
#include "netopt/rng.hpp"
#include "netopt/wire.hpp"

namespace netopt {

// Per-endpoint byte/packet accounting. Element-level counters live in the
// transport endpoints; these are wire-level.
struct TrafficCounters {
  std::uint64_t data_bytes_tx = 0;
  std::uint64_t data_bytes_rx = 0;
  std::uint64_t data_packets_tx = 0;
  std::uint64_t data_packets_rx = 0;
  std::uint64_t heartbeat_bytes_tx = 0;
  std::uint64_t heartbeat_bytes_rx = 0;
  std::uint64_t packets_lost_injected = 0;
  std::uint64_t packets_dup_injected = 0;
};

struct LinkParams {
  Tick latency = 10;        // fixed propagation delay
  Tick jitter = 0;          // extra delay drawn uniformly from [0, jitter]
  double loss_prob = 0.0;
  double dup_prob = 0.0;
};

class DeadlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic in-process discrete-event network. Packets are serialized
// onto links at one tick per packet (line rate), then delivered after the
// link latency. Loss and duplication are decided at send time from one
// seeded generator, so a (seed, config) pair fixes the whole trace.
class SimFabric {
 public:
  SimFabric(std::uint64_t seed, int num_workers, LinkParams defaults);

  using PacketHandler = std::function<void(const Packet&)>;

  void set_handler(NodeId node, PacketHandler handler);

  // Override the link src->dst (tests inject loss on specific links).
  void set_link(NodeId src, NodeId dst, LinkParams params);

  void send(NodeId src, NodeId dst, const Packet& pkt);
  void call_at(Tick when, std::function<void()> fn);

  Tick now() const { return now_; }
  bool queue_empty() const { return events_.empty(); }
  std::uint64_t deliveries() const { return deliveries_; }
  Tick last_delivery_tick() const { return last_delivery_; }

  // Process the earliest event. Returns false if the queue is empty.
  bool step();

  struct RunLimits {
    Tick max_ticks = 500'000'000;
    Tick stall_ticks = 2'000'000;  // no packet delivered for this long => stuck
  };
  // Run until done() is true. Throws DeadlockError (with a trace dump in
  // the message) if the queue drains or the fabric stalls first.
  void run_until(const std::function<bool()>& done, RunLimits limits = {});

  TrafficCounters& counters(NodeId node) { return counters_[key(node)]; }
  const TrafficCounters& counters(NodeId node) const;

  void enable_trace(bool on) { trace_on_ = on; }
  const std::vector<std::string>& trace() const { return trace_; }
  std::string trace_tail(std::size_t lines) const;

 private:
  struct Event {
    Tick at;
    std::uint64_t order;  // tie-break, insertion sequence
    bool is_packet;
    NodeId src, dst;
    Packet packet;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.order > b.order;
    }
  };
  struct LinkState {
    LinkParams params;
    Tick busy_until = 0;
  };

  static int key(NodeId node);
  LinkState& link(NodeId src, NodeId dst);

  int num_workers_;
  LinkParams defaults_;
  DetRng rng_;
  Tick now_ = 0;
  std::uint64_t order_ = 0;
  std::uint64_t deliveries_ = 0;
  Tick last_delivery_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::map<std::pair<int, int>, LinkState> links_;
  std::map<int, PacketHandler> handlers_;
  std::map<int, TrafficCounters> counters_;
  bool trace_on_ = false;
  std::vector<std::string> trace_;
};

// Analytical traffic baselines. A push or pull moves S elements per
// endpoint here; a ring collective moves 2(N-1)S/N per worker (send plus
// receive). The ratio of the two is N : 2(N-1).
struct TrafficModel {
  static std::uint64_t ring_reference_elems(int num_workers, std::uint64_t s) {
    if (num_workers <= 1) return 0;
    return 2ULL * (num_workers - 1) * s / num_workers;
  }
  static std::pair<std::uint64_t, std::uint64_t> collective_ratio(
      int num_workers) {
    return {static_cast<std::uint64_t>(num_workers),
            2ULL * (num_workers > 0 ? num_workers - 1 : 0)};
  }
};

}  // namespace netopt
