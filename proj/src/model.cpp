// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#include "netopt/model.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace netopt {
namespace {

constexpr std::uint64_t kInitTag = 0x1717;
constexpr std::uint64_t kDataTag = 0xDA7A;
constexpr std::uint64_t kTeacherTag = 0x7EAC;

// The regression target comes from one fixed random layer.
std::vector<float> teacher_weights(const ToyModelConfig& cfg,
                                   std::uint64_t seed) {
  const int h = cfg.hidden;
  DetRng rng(derive_seed(seed, kTeacherTag));
  std::vector<float> w(static_cast<std::size_t>(h) * h);
  const float bound = 1.0f / std::sqrt(static_cast<float>(h));
  for (float& v : w) v = rng.uniform_f(-bound, bound);
  return w;
}

}  // namespace

std::vector<LayerSpec> model_layer_specs(const ToyModelConfig& cfg) {
  std::vector<std::uint64_t> counts(cfg.layers, cfg.block_elems());
  return make_layer_specs(counts);
}

std::vector<float> init_layer_params(const ToyModelConfig& cfg,
                                     std::uint64_t seed, std::uint32_t layer) {
  const int h = cfg.hidden;
  DetRng rng(derive_seed(seed, kInitTag, layer));
  std::vector<float> params(cfg.block_elems(), 0.0f);
  const float bound = 1.0f / std::sqrt(static_cast<float>(h));
  for (int i = 0; i < h * h; ++i) params[i] = rng.uniform_f(-bound, bound);
  // bias stays zero
  return params;
}

Sample make_sample(const ToyModelConfig& cfg, std::uint64_t seed,
                   std::uint32_t round, std::uint64_t index) {
  const int h = cfg.hidden;
  DetRng rng(derive_seed(seed, kDataTag, round, index));
  Sample s;
  s.x.resize(h);
  for (float& v : s.x) v = rng.uniform_f(-1.0f, 1.0f);

  static thread_local std::vector<float> teacher;
  static thread_local std::uint64_t teacher_seed = ~0ULL;
  static thread_local int teacher_h = -1;
  if (teacher_seed != seed || teacher_h != h) {
    teacher = teacher_weights(cfg, seed);
    teacher_seed = seed;
    teacher_h = h;
  }
  s.y.resize(h);
  for (int r = 0; r < h; ++r) {
    float acc = 0.0f;
    for (int c = 0; c < h; ++c) acc += teacher[r * h + c] * s.x[c];
    s.y[r] = std::tanh(acc);
  }
  return s;
}

void block_forward(std::span<const float> params, std::span<const float> x,
                   std::span<float> y, int hidden) {
  const float* w = params.data();
  const float* b = params.data() + hidden * hidden;
  for (int r = 0; r < hidden; ++r) {
    float acc = b[r];
    const float* row = w + static_cast<std::size_t>(r) * hidden;
    for (int c = 0; c < hidden; ++c) acc += row[c] * x[c];
    y[r] = std::tanh(acc);
  }
}

ShardComputation::ShardComputation(const ToyModelConfig& cfg,
                                   std::uint64_t seed, std::uint32_t round,
                                   int worker_id, int batch_per_worker,
                                   int num_workers)
    : cfg_(cfg), batch_(static_cast<std::size_t>(batch_per_worker)) {
  const std::uint64_t global_batch =
      static_cast<std::uint64_t>(batch_per_worker) * num_workers;
  scale_ = 1.0 / (static_cast<double>(global_batch) * cfg_.hidden);
  shard_.reserve(batch_);
  const std::uint64_t base =
      static_cast<std::uint64_t>(worker_id) * batch_per_worker;
  for (std::size_t j = 0; j < batch_; ++j) {
    shard_.push_back(make_sample(cfg_, seed, round, base + j));
  }
  acts_.resize(cfg_.layers + 1);
  acts_[0].reserve(batch_);
  for (const Sample& s : shard_) acts_[0].push_back(s.x);
}

void ShardComputation::forward_block(int block, std::span<const float> params) {
  if (block != fwd_next_) throw std::logic_error("forward blocks out of order");
  if (params.size() != cfg_.block_elems()) {
    throw std::logic_error("forward_block: bad parameter length");
  }
  const int h = cfg_.hidden;
  acts_[block + 1].assign(batch_, std::vector<float>(h));
  for (std::size_t j = 0; j < batch_; ++j) {
    block_forward(params, acts_[block][j], acts_[block + 1][j], h);
  }
  ++fwd_next_;
  if (fwd_next_ == cfg_.layers) bwd_next_ = cfg_.layers - 1;
}

double ShardComputation::loss_partial() const {
  if (fwd_next_ != cfg_.layers) throw std::logic_error("forward incomplete");
  double loss = 0.0;
  for (std::size_t j = 0; j < batch_; ++j) {
    const auto& out = acts_[cfg_.layers][j];
    const auto& tgt = shard_[j].y;
    for (int i = 0; i < cfg_.hidden; ++i) {
      const double d = static_cast<double>(out[i]) - tgt[i];
      loss += d * d;
    }
  }
  return loss * scale_;
}

std::vector<float> ShardComputation::backward_block(
    int block, std::span<const float> params) {
  if (block != bwd_next_) throw std::logic_error("backward blocks out of order");
  const int h = cfg_.hidden;
  if (block == cfg_.layers - 1) {
    // Seed dLoss/d(output): 2 * scale * (out - target).
    delta_.assign(batch_, std::vector<float>(h));
    const float s2 = static_cast<float>(2.0 * scale_);
    for (std::size_t j = 0; j < batch_; ++j) {
      const auto& out = acts_[cfg_.layers][j];
      for (int i = 0; i < h; ++i) delta_[j][i] = s2 * (out[i] - shard_[j].y[i]);
    }
  }

  std::vector<float> grad(cfg_.block_elems(), 0.0f);
  float* dw = grad.data();
  float* db = grad.data() + h * h;
  const float* w = params.data();
  std::vector<std::vector<float>> next_delta(batch_,
                                             std::vector<float>(h, 0.0f));
  for (std::size_t j = 0; j < batch_; ++j) {
    const auto& zin = acts_[block][j];
    const auto& zout = acts_[block + 1][j];
    for (int r = 0; r < h; ++r) {
      // d tanh(u) = 1 - tanh(u)^2, with tanh(u) checkpointed as zout.
      const float du = delta_[j][r] * (1.0f - zout[r] * zout[r]);
      db[r] += du;
      float* dwrow = dw + static_cast<std::size_t>(r) * h;
      const float* wrow = w + static_cast<std::size_t>(r) * h;
      for (int c = 0; c < h; ++c) {
        dwrow[c] += du * zin[c];
        next_delta[j][c] += wrow[c] * du;
      }
    }
  }
  delta_ = std::move(next_delta);
  --bwd_next_;
  return grad;
}

}  // namespace netopt
