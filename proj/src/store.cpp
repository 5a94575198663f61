// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/store.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace netopt {

static_assert(std::endian::native == std::endian::little,
              "store files are little-endian fp32; big-endian hosts need a swap");

namespace {

const char* state_file_name(StateKind which) {
  switch (which) {
    case StateKind::Params:  return "params.f32";
    case StateKind::MomentM: return "adam_m.f32";
    case StateKind::MomentV: return "adam_v.f32";
  }
  return nullptr;
}

}  // namespace

std::vector<LayerSpec> make_layer_specs(std::span<const std::uint64_t> counts) {
  std::vector<LayerSpec> out;
  std::uint64_t off = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.push_back({static_cast<std::uint32_t>(i), counts[i], off});
    off += counts[i];
  }
  return out;
}

void ModelStateStore::create(const std::string& dir,
                             std::span<const LayerSpec> layers,
                             const InitFn& param_init) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream manifest(dir + "/manifest.txt");
  if (!manifest) throw IoError("cannot write manifest in " + dir);
  manifest << "layers " << layers.size() << "\n";
  for (const LayerSpec& l : layers) {
    manifest << "layer " << l.layer_id << " count " << l.param_count
             << " offset " << l.offset << "\n";
  }
  manifest.close();

  std::uint64_t total = 0;
  for (const LayerSpec& l : layers) total += l.param_count;

  for (StateKind which :
       {StateKind::Params, StateKind::MomentM, StateKind::MomentV}) {
    std::ofstream f(dir + "/" + state_file_name(which), std::ios::binary);
    if (!f) throw IoError(std::string("cannot create ") + state_file_name(which));
    if (which == StateKind::Params) {
      for (const LayerSpec& l : layers) {
        std::vector<float> init = param_init(l);
        if (init.size() != l.param_count) {
          throw IoError("param_init returned wrong length for layer " +
                        std::to_string(l.layer_id));
        }
        f.write(reinterpret_cast<const char*>(init.data()),
                static_cast<std::streamsize>(init.size() * sizeof(float)));
      }
    } else {
      const std::vector<float> zeros(4096, 0.0f);
      std::uint64_t left = total;
      while (left > 0) {
        const std::uint64_t n = std::min<std::uint64_t>(left, zeros.size());
        f.write(reinterpret_cast<const char*>(zeros.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        left -= n;
      }
    }
    if (!f) throw IoError(std::string("short write creating ") +
                          state_file_name(which));
  }
}

ModelStateStore::ModelStateStore(std::string dir, double rate_limit_bytes_per_sec)
    : dir_(std::move(dir)), rate_(rate_limit_bytes_per_sec) {
  std::ifstream manifest(dir_ + "/manifest.txt");
  if (!manifest) throw IoError("cannot open manifest in " + dir_);
  std::string word;
  std::size_t layer_count = 0;
  if (!(manifest >> word >> layer_count) || word != "layers") {
    throw IoError("bad manifest header in " + dir_);
  }
  layers_.reserve(layer_count);
  for (std::size_t i = 0; i < layer_count; ++i) {
    LayerSpec l;
    std::string kw_layer, kw_count, kw_offset;
    if (!(manifest >> kw_layer >> l.layer_id >> kw_count >> l.param_count >>
          kw_offset >> l.offset) ||
        kw_layer != "layer" || kw_count != "count" || kw_offset != "offset") {
      throw IoError("bad manifest line " + std::to_string(i) + " in " + dir_);
    }
    layers_.push_back(l);
    total_elems_ += l.param_count;
  }
  for (StateKind which :
       {StateKind::Params, StateKind::MomentM, StateKind::MomentV}) {
    const std::string path = dir_ + "/" + state_file_name(which);
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    if (!f) throw IoError("cannot open " + path);
    files_[static_cast<int>(which)] = f;
  }
}

ModelStateStore::~ModelStateStore() {
  for (std::FILE* f : files_) {
    if (f) std::fclose(f);
  }
}

std::FILE* ModelStateStore::file_for(StateKind which) {
  return files_[static_cast<int>(which)];
}

Tick ModelStateStore::transfer_ticks(std::uint64_t bytes) const {
  if (rate_ <= 0) return 0;
  return static_cast<Tick>(
      std::ceil(static_cast<double>(bytes) / rate_ * kTicksPerSecond));
}

void ModelStateStore::submit(const IoRequest& req) {
  if (req.layer >= layers_.size()) {
    throw IoError("io request for unknown layer " + std::to_string(req.layer));
  }
  const std::uint64_t count = layers_[req.layer].param_count;
  const std::size_t got =
      req.is_write ? req.write_buf.size() : req.read_buf.size();
  if (got != count) {
    throw IoError("io request buffer length " + std::to_string(got) +
                  " != layer count " + std::to_string(count));
  }
  if (req.completion == nullptr) throw IoError("io request without completion");
  if (req.is_write != (req.queue == IoQueueKind::WriteStates)) {
    throw IoError("io direction does not match queue kind");
  }
  queues_[static_cast<int>(req.queue)].push_back(req);
}

void ModelStateStore::do_transfer(const IoRequest& req) {
  const LayerSpec& layer = layers_[req.layer];
  std::FILE* f = file_for(req.which);
  const long byte_off = static_cast<long>(layer.offset * sizeof(float));
  if (std::fseek(f, byte_off, SEEK_SET) != 0) {
    throw IoError("seek failed in " + dir_);
  }
  if (req.is_write) {
    const std::size_t n =
        std::fwrite(req.write_buf.data(), sizeof(float), req.write_buf.size(), f);
    if (n != req.write_buf.size()) throw IoError("short write in " + dir_);
    std::fflush(f);
    counters_.write_bytes += n * sizeof(float);
  } else {
    const std::size_t n =
        std::fread(req.read_buf.data(), sizeof(float), req.read_buf.size(), f);
    if (n != req.read_buf.size()) throw IoError("short read in " + dir_);
    counters_.read_bytes += n * sizeof(float);
  }
}

void ModelStateStore::pump(Tick now) {
  for (;;) {
    if (active_) {
      if (active_->finish > now) return;  // device busy
      active_->req.completion->bytes_moved.store(
          layers_[active_->req.layer].param_count * sizeof(float),
          std::memory_order_release);
      active_->req.completion->state.store(CompletionState::Ok,
                                           std::memory_order_release);
      active_.reset();
    }
    // Strict priority: a lower queue is looked at only when every higher
    // one is empty.
    int qi = -1;
    for (int i = 0; i < 3; ++i) {
      if (!queues_[i].empty()) {
        qi = i;
        break;
      }
    }
    if (qi < 0) return;
    if (qi == static_cast<int>(IoQueueKind::WriteStates)) {
      assert(queues_[0].empty() && queues_[1].empty());
    }
    IoRequest req = queues_[qi].front();
    queues_[qi].pop_front();
    ++counters_.dispatches[qi];
    do_transfer(req);  // bytes move now; the simulated clock charges below
    const std::uint64_t bytes = layers_[req.layer].param_count * sizeof(float);
    const Tick start = std::max(now, device_free_);
    device_free_ = start + transfer_ticks(bytes);
    active_ = Active{req, device_free_};
  }
}

Tick ModelStateStore::next_due() const {
  if (active_) return active_->finish;
  return std::numeric_limits<Tick>::max();
}

bool ModelStateStore::idle() const {
  if (active_) return false;
  for (const auto& q : queues_) {
    if (!q.empty()) return false;
  }
  return true;
}

std::vector<float> ModelStateStore::read_now(std::uint32_t layer,
                                             StateKind which) {
  const LayerSpec& l = layers_.at(layer);
  std::vector<float> out(l.param_count);
  std::FILE* f = file_for(which);
  if (std::fseek(f, static_cast<long>(l.offset * sizeof(float)), SEEK_SET) != 0 ||
      std::fread(out.data(), sizeof(float), out.size(), f) != out.size()) {
    throw IoError("read_now failed in " + dir_);
  }
  return out;
}

void ModelStateStore::write_now(std::uint32_t layer, StateKind which,
                                std::span<const float> data) {
  const LayerSpec& l = layers_.at(layer);
  if (data.size() != l.param_count) throw IoError("write_now length mismatch");
  std::FILE* f = file_for(which);
  if (std::fseek(f, static_cast<long>(l.offset * sizeof(float)), SEEK_SET) != 0 ||
      std::fwrite(data.data(), sizeof(float), data.size(), f) != data.size()) {
    throw IoError("write_now failed in " + dir_);
  }
  std::fflush(f);
}

}  // namespace netopt
