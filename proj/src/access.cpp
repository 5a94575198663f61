// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/access.hpp"

#include <algorithm>
#include <stdexcept>

namespace netopt {

AccessModule::AccessModule(const AccessConfig& cfg, TransportEndpoint& ep)
    : cfg_(cfg), ep_(ep) {
  cfg_.quant.validate();
  if (cfg_.elems_per_packet == 0) {
    throw std::invalid_argument("elems_per_packet must be positive");
  }
}

bool AccessModule::submit(const AccessRequest& req) {
  std::size_t len = 0;
  if (req.kind == AccessKind::Push) {
    len = req.push_floats.empty() ? req.push_ints.size() : req.push_floats.size();
  } else {
    len = req.pull_floats.size();
  }
  if (len == 0 || len > cfg_.max_message_elems) {
    throw std::invalid_argument("access request length " + std::to_string(len) +
                                " out of range");
  }
  if (req.completion == nullptr) {
    throw std::invalid_argument("access request without completion cell");
  }
  auto& q = req.kind == AccessKind::Push ? push_q_ : pull_q_;
  if (q.size() >= cfg_.queue_depth) return false;

  PendingReq p;
  p.req = req;
  p.len = len;
  q.push_back(std::move(p));
  if (log_on_) request_log_.emplace_back(req.kind, len);
  pump();
  return true;
}

void AccessModule::complete(PendingReq& p, bool ok, const std::string& reason) {
  p.req.completion->bytes_moved.store(4 * p.moved, std::memory_order_release);
  if (!ok) p.req.completion->fail_reason = reason;
  p.req.completion->state.store(ok ? CompletionState::Ok : CompletionState::Failed,
                                std::memory_order_release);
  ++counters_.requests_completed;
}

void AccessModule::pump() {
  pump_push();
  pump_pull();
}

void AccessModule::pump_push() {
  while (!push_q_.empty()) {
    PendingReq& p = push_q_.front();
    if (!p.staged) {
      if (!p.req.push_floats.empty()) {
        QuantResult q = to_fixed(p.req.push_floats, cfg_.quant);
        p.stage = std::move(q.values);
        counters_.clamp_count += q.clamp_count;
      } else {
        p.stage.assign(p.req.push_ints.begin(), p.req.push_ints.end());
      }
      p.staged = true;
    }
    while (p.moved < p.len) {
      const std::size_t chunk =
          std::min<std::size_t>(cfg_.elems_per_packet, p.len - p.moved);
      std::vector<std::int32_t> payload(p.stage.begin() + p.moved,
                                        p.stage.begin() + p.moved + chunk);
      if (!ep_.tx_offer(std::move(payload))) return;  // backpressure; retry later
      p.moved += chunk;
      counters_.pushed_elems += chunk;
    }
    complete(p, true);
    push_q_.pop_front();
  }
}

void AccessModule::pump_pull() {
  while (!pull_q_.empty()) {
    PendingReq& p = pull_q_.front();
    while (p.moved < p.len) {
      auto payload = ep_.rx_pop();
      if (!payload) return;  // nothing releasable yet
      const std::size_t expect =
          std::min<std::size_t>(cfg_.elems_per_packet, p.len - p.moved);
      if (payload->size() != expect) {
        complete(p, false, "LengthMismatch: stream framing disagrees with request");
        throw std::runtime_error(
            "pull framing mismatch: got payload of " +
            std::to_string(payload->size()) + " elems, expected " +
            std::to_string(expect));
      }
      for (std::size_t i = 0; i < payload->size(); ++i) {
        p.req.pull_floats[p.moved + i] =
            from_fixed_scalar((*payload)[i], cfg_.quant);
      }
      p.moved += payload->size();
      counters_.pulled_elems += payload->size();
    }
    complete(p, true);
    pull_q_.pop_front();
  }
}

}  // namespace netopt
