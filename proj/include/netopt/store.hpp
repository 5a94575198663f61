// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "netopt/access.hpp"  // CompletionCell
#include "netopt/common.hpp"

namespace netopt {

struct LayerSpec {
  std::uint32_t layer_id = 0;
  std::uint64_t param_count = 0;
  std::uint64_t offset = 0;  // element offset into the flat model
};

// Builds contiguous layer specs: offsets are prefix sums, ids 0..L-1.
std::vector<LayerSpec> make_layer_specs(std::span<const std::uint64_t> counts);

enum class StateKind : std::uint8_t { Params, MomentM, MomentV };
enum class IoQueueKind : std::uint8_t { ReadParams, ReadStates, WriteStates };

struct IoRequest {
  IoQueueKind queue = IoQueueKind::ReadParams;
  bool is_write = false;
  std::uint32_t layer = 0;
  StateKind which = StateKind::Params;
  std::span<float> read_buf{};
  std::span<const float> write_buf{};
  CompletionCell* completion = nullptr;
};

struct StoreCounters {
  std::uint64_t read_bytes = 0;
  std::uint64_t write_bytes = 0;
  std::uint64_t dispatches[3] = {0, 0, 0};  // by IoQueueKind
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File-backed per-layer parameters and Adam moments. Layout on disk:
//   <dir>/manifest.txt   plain text: layer ids, counts, offsets
//   <dir>/params.f32     raw little-endian fp32, flat model order
//   <dir>/adam_m.f32     first moment, same layout
//   <dir>/adam_v.f32     second moment, same layout
//
// IO goes through three strict-priority queues (read params > read states
// > write states) in front of one device with an optional byte-rate
// limit; a request's completion fires when its simulated transfer ends.
class ModelStateStore {
 public:
  using InitFn = std::function<std::vector<float>(const LayerSpec&)>;

  // Creates the directory contents. Moments always start at zero.
  static void create(const std::string& dir,
                     std::span<const LayerSpec> layers,
                     const InitFn& param_init);

  ModelStateStore(std::string dir, double rate_limit_bytes_per_sec);
  ~ModelStateStore();

  ModelStateStore(const ModelStateStore&) = delete;
  ModelStateStore& operator=(const ModelStateStore&) = delete;

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::uint64_t total_elems() const { return total_elems_; }

  void submit(const IoRequest& req);

  // Fire due completions, then dispatch while the device is free.
  void pump(Tick now);
  Tick next_due() const;
  bool idle() const;

  const StoreCounters& counters() const { return counters_; }

  // Synchronous access for referees and fixtures; bypasses the queues.
  std::vector<float> read_now(std::uint32_t layer, StateKind which);
  void write_now(std::uint32_t layer, StateKind which,
                 std::span<const float> data);

 private:
  struct Active {
    IoRequest req;
    Tick finish = 0;
  };

  std::FILE* file_for(StateKind which);
  void do_transfer(const IoRequest& req);
  Tick transfer_ticks(std::uint64_t bytes) const;

  std::string dir_;
  double rate_ = 0;  // bytes per second; 0 = unlimited
  std::vector<LayerSpec> layers_;
  std::uint64_t total_elems_ = 0;
  std::FILE* files_[3] = {nullptr, nullptr, nullptr};
  std::deque<IoRequest> queues_[3];  // indexed by IoQueueKind
  std::optional<Active> active_;
  Tick device_free_ = 0;
  StoreCounters counters_;
};

}  // namespace netopt
