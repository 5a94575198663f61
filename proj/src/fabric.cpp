// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/fabric.hpp"

#include <algorithm>
#include <sstream>

namespace netopt {
namespace {

const char* kind_tag(PacketKind k) {
  switch (k) {
    case PacketKind::ParamData:      return "pd";
    case PacketKind::GradData:       return "gd";
    case PacketKind::ParamHeartbeat: return "ph";
    case PacketKind::GradHeartbeat:  return "gh";
  }
  return "??";
}

}  // namespace

SimFabric::SimFabric(std::uint64_t seed, int num_workers, LinkParams defaults)
    : num_workers_(num_workers),
      defaults_(defaults),
      rng_(derive_seed(seed, 0xFAB21C)) {}

int SimFabric::key(NodeId node) {
  switch (node.kind) {
    case NodeKind::Worker:    return node.index;
    case NodeKind::Switch:    return 0x100;
    case NodeKind::Optimizer: return 0x101;
  }
  return -1;
}

void SimFabric::set_handler(NodeId node, PacketHandler handler) {
  handlers_[key(node)] = std::move(handler);
}

void SimFabric::set_link(NodeId src, NodeId dst, LinkParams params) {
  link(src, dst).params = params;
}

SimFabric::LinkState& SimFabric::link(NodeId src, NodeId dst) {
  auto [it, inserted] =
      links_.try_emplace({key(src), key(dst)}, LinkState{defaults_, 0});
  return it->second;
}

const TrafficCounters& SimFabric::counters(NodeId node) const {
  static const TrafficCounters kEmpty;
  auto it = counters_.find(key(node));
  return it == counters_.end() ? kEmpty : it->second;
}

void SimFabric::send(NodeId src, NodeId dst, const Packet& pkt) {
  const std::size_t bytes = encoded_size(pkt);
  TrafficCounters& tx = counters_[key(src)];
  if (is_data_kind(pkt.kind)) {
    tx.data_bytes_tx += bytes;
    ++tx.data_packets_tx;
  } else {
    tx.heartbeat_bytes_tx += bytes;
  }

  LinkState& l = link(src, dst);
  const Tick dispatch = std::max(now_, l.busy_until);
  l.busy_until = dispatch + 1;  // one tick of service per packet

  auto schedule_copy = [&] {
    const Tick extra =
        l.params.jitter > 0
            ? static_cast<Tick>(rng_.below(
                  static_cast<std::uint64_t>(l.params.jitter) + 1))
            : 0;
    Event ev;
    ev.at = dispatch + 1 + l.params.latency + extra;
    ev.order = order_++;
    ev.is_packet = true;
    ev.src = src;
    ev.dst = dst;
    ev.packet = pkt;
    events_.push(std::move(ev));
  };

  if (l.params.loss_prob > 0 && rng_.chance(l.params.loss_prob)) {
    ++tx.packets_lost_injected;
    return;
  }
  schedule_copy();
  if (l.params.dup_prob > 0 && rng_.chance(l.params.dup_prob)) {
    ++tx.packets_dup_injected;
    schedule_copy();
  }
}

void SimFabric::call_at(Tick when, std::function<void()> fn) {
  Event ev;
  ev.at = std::max(when, now_);
  ev.order = order_++;
  ev.is_packet = false;
  ev.fn = std::move(fn);
  events_.push(std::move(ev));
}

bool SimFabric::step() {
  if (events_.empty()) return false;
  Event ev = events_.top();
  events_.pop();
  now_ = std::max(now_, ev.at);
  if (ev.is_packet) {
    ++deliveries_;
    last_delivery_ = now_;
    TrafficCounters& rx = counters_[key(ev.dst)];
    const std::size_t bytes = encoded_size(ev.packet);
    if (is_data_kind(ev.packet.kind)) {
      rx.data_bytes_rx += bytes;
      ++rx.data_packets_rx;
    } else {
      rx.heartbeat_bytes_rx += bytes;
    }
    if (trace_on_) {
      std::ostringstream line;
      line << now_ << ' ' << kind_tag(ev.packet.kind) << ' '
           << to_string(ev.src) << ' ' << to_string(ev.dst) << ' '
           << ev.packet.seq_num << ' ' << ev.packet.values.size();
      trace_.push_back(line.str());
    }
    auto it = handlers_.find(key(ev.dst));
    if (it != handlers_.end()) it->second(ev.packet);
  } else {
    ev.fn();
  }
  return true;
}

std::string SimFabric::trace_tail(std::size_t lines) const {
  std::ostringstream out;
  const std::size_t start = trace_.size() > lines ? trace_.size() - lines : 0;
  for (std::size_t i = start; i < trace_.size(); ++i) out << trace_[i] << '\n';
  return out.str();
}

void SimFabric::run_until(const std::function<bool()>& done, RunLimits limits) {
  while (!done()) {
    if (events_.empty()) {
      throw DeadlockError(
          "event queue drained with application work pending at tick " +
          std::to_string(now_) + "\n" + trace_tail(50));
    }
    if (now_ > limits.max_ticks) {
      throw DeadlockError("exceeded max simulated ticks (" +
                          std::to_string(limits.max_ticks) + ")\n" +
                          trace_tail(50));
    }
    if (deliveries_ > 0 && now_ - last_delivery_ > limits.stall_ticks) {
      throw DeadlockError("no packet delivered for " +
                          std::to_string(now_ - last_delivery_) +
                          " ticks; fabric stalled\n" + trace_tail(50));
    }
    step();
  }
}

}  // namespace netopt
