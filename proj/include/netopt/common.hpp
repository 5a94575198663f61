// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace netopt {

// Simulated time. One tick is one packet service time at line rate; for
// anything expressed in seconds (SSD rate limits, UDP timers) one tick
// maps to one microsecond.
using Tick = std::int64_t;
inline constexpr Tick kTicksPerSecond = 1'000'000;

// Endpoint id carried in the packet header. Workers are 0..N-1.
inline constexpr std::uint8_t kOptimizerId = 0xFF;

enum class NodeKind : std::uint8_t { Worker, Switch, Optimizer };

struct NodeId {
  NodeKind kind = NodeKind::Worker;
  std::uint8_t index = 0;  // worker index; 0 for switch/optimizer

  static NodeId worker(std::uint8_t i) { return {NodeKind::Worker, i}; }
  static NodeId sw() { return {NodeKind::Switch, 0}; }
  static NodeId optimizer() { return {NodeKind::Optimizer, 0}; }

  bool operator==(const NodeId&) const = default;
};

inline std::string to_string(NodeId id) {
  switch (id.kind) {
    case NodeKind::Worker:    return "w" + std::to_string(id.index);
    case NodeKind::Switch:    return "sw";
    case NodeKind::Optimizer: return "opt";
  }
  return "?";
}

}  // namespace netopt
