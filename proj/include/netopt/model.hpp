// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netopt/rng.hpp"
#include "netopt/store.hpp"

namespace netopt {

// Stand-in for a transformer stack: L fully-connected blocks
// y = tanh(W x + b) with W of shape h x h (row-major) followed by the bias,
// trained as mean-squared-error regression against a fixed random teacher.
// Parameter layout per layer: [W (h*h elements), b (h elements)].
struct ToyModelConfig {
  int layers = 4;
  int hidden = 32;

  std::uint64_t block_elems() const {
    return static_cast<std::uint64_t>(hidden) * hidden + hidden;
  }
  std::uint64_t total_elems() const { return block_elems() * layers; }
};

std::vector<LayerSpec> model_layer_specs(const ToyModelConfig& cfg);

// Deterministic weight init: W uniform in +/- 1/sqrt(h), bias zero.
std::vector<float> init_layer_params(const ToyModelConfig& cfg,
                                     std::uint64_t seed, std::uint32_t layer);

struct Sample {
  std::vector<float> x;
  std::vector<float> y;
};

// Sample `index` of round `round`: inputs uniform in [-1, 1], targets from
// a fixed random single-layer teacher. Workers own disjoint index ranges;
// the union over workers is the oracle's global batch.
Sample make_sample(const ToyModelConfig& cfg, std::uint64_t seed,
                   std::uint32_t round, std::uint64_t index);

// y = tanh(W x + b).
void block_forward(std::span<const float> params, std::span<const float> x,
                   std::span<float> y, int hidden);

// One worker's compute for one round over its shard of the batch.
// forward_block must be called for blocks 0..L-1 in order; backward_block
// for L-1..0 in reverse, each with the (re-pulled) parameters of that
// block. Gradients are scaled by 1/(global_batch * h) so that summing the
// per-worker gradients yields the global mean-squared-error gradient.
class ShardComputation {
 public:
  ShardComputation(const ToyModelConfig& cfg, std::uint64_t seed,
                   std::uint32_t round, int worker_id, int batch_per_worker,
                   int num_workers);

  void forward_block(int block, std::span<const float> params);

  // Valid after the last forward_block: this worker's loss contribution;
  // summing over workers gives the global MSE.
  double loss_partial() const;

  std::vector<float> backward_block(int block, std::span<const float> params);

  int blocks() const { return cfg_.layers; }

 private:
  ToyModelConfig cfg_;
  std::size_t batch_;
  double scale_;  // 1 / (global_batch * h)
  std::vector<Sample> shard_;
  // acts_[k][j] = input of block k for sample j; acts_[L][j] = output
  std::vector<std::vector<std::vector<float>>> acts_;
  std::vector<std::vector<float>> delta_;  // dLoss/d(block output), per sample
  int fwd_next_ = 0;
  int bwd_next_ = -1;
};

}  // namespace netopt
