// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "netopt/quant.hpp"
#include "netopt/transport.hpp"

namespace netopt {

enum class AccessKind : std::uint8_t { Push, Pull };

enum class CompletionState : std::uint8_t { Pending, Ok, Failed };

// Single-writer (module) / multi-reader (application) completion cell.
struct CompletionCell {
  std::atomic<CompletionState> state{CompletionState::Pending};
  std::atomic<std::uint64_t> bytes_moved{0};
  std::string fail_reason;  // written before state, read after

  bool pending() const {
    return state.load(std::memory_order_acquire) == CompletionState::Pending;
  }
  bool ok() const {
    return state.load(std::memory_order_acquire) == CompletionState::Ok;
  }
  void reset() {
    state.store(CompletionState::Pending, std::memory_order_release);
    bytes_moved.store(0, std::memory_order_release);
    fail_reason.clear();
  }
};

// Exactly one of the spans is non-empty, matching kind and content:
// quantizing pushes use push_floats, verbatim pushes (already fixed-point)
// use push_ints, pulls fill pull_floats. The referenced buffer must stay
// valid until the completion cell leaves Pending.
struct AccessRequest {
  AccessKind kind = AccessKind::Push;
  std::span<const float> push_floats{};
  std::span<const std::int32_t> push_ints{};
  std::span<float> pull_floats{};
  CompletionCell* completion = nullptr;
};

struct AccessConfig {
  std::size_t queue_depth = 64;
  std::size_t max_message_elems = 1u << 22;
  std::uint16_t elems_per_packet = kDefaultElemsPerPacket;
  QuantConfig quant;  // to_fixed for float pushes, from_fixed for pulls
};

struct AccessCounters {
  std::uint64_t clamp_count = 0;
  std::uint64_t pushed_elems = 0;
  std::uint64_t pulled_elems = 0;
  std::uint64_t requests_completed = 0;
};

// Asynchronous bridge between application buffers and one transport
// endpoint. Push and pull live in separate FIFO queues so neither blocks
// the other; the head request of each queue moves data in packet-sized
// chunks, respecting transport backpressure, and signals its completion
// cell exactly once.
class AccessModule {
 public:
  AccessModule(const AccessConfig& cfg, TransportEndpoint& ep);

  // False when the matching queue is full (caller retries). Throws
  // std::invalid_argument on a zero/oversized length.
  bool submit(const AccessRequest& req);

  // Advance both queue heads as far as transport state allows.
  void pump();

  bool idle() const { return push_q_.empty() && pull_q_.empty(); }
  std::size_t push_backlog() const { return push_q_.size(); }
  std::size_t pull_backlog() const { return pull_q_.size(); }

  const AccessCounters& counters() const { return counters_; }

  // Lockstep audit: (kind, element count) per submitted request.
  void enable_request_log(bool on) { log_on_ = on; }
  const std::vector<std::pair<AccessKind, std::size_t>>& request_log() const {
    return request_log_;
  }

 private:
  struct PendingReq {
    AccessRequest req;
    std::size_t len = 0;
    std::size_t moved = 0;            // elements transferred so far
    bool staged = false;              // push: quantized/copied into staging
    std::vector<std::int32_t> stage;  // push staging (wire representation)
  };

  void pump_push();
  void pump_pull();
  void complete(PendingReq& p, bool ok, const std::string& reason = {});

  AccessConfig cfg_;
  TransportEndpoint& ep_;
  std::deque<PendingReq> push_q_;
  std::deque<PendingReq> pull_q_;
  AccessCounters counters_;
  bool log_on_ = false;
  std::vector<std::pair<AccessKind, std::size_t>> request_log_;
};

}  // namespace netopt
