// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace netopt {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) {
      throw std::invalid_argument("adam betas must be in [0, 1)");
    }
    if (epsilon <= 0) throw std::invalid_argument("adam epsilon must be > 0");
  }
};

// In-place Adam with bias correction; t is the 1-based step count.
// Arithmetic runs in double in a fixed elementwise order and narrows back
// to the fp32 state, so two runs over the same bytes produce the same
// bytes.
inline void adam_update(std::span<float> p, std::span<float> m,
                        std::span<float> v, std::span<const float> g,
                        const AdamConfig& cfg, std::int64_t t) {
  if (p.size() != m.size() || p.size() != v.size() || p.size() != g.size()) {
    throw std::invalid_argument("adam_update: length mismatch");
  }
  if (t < 1) throw std::invalid_argument("adam_update: step count starts at 1");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i];
    const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
    const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
    const double mhat = mi / bc1;
    const double vhat = vi / bc2;
    const double pi = p[i] - cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    m[i] = static_cast<float>(mi);
    v[i] = static_cast<float>(vi);
    p[i] = static_cast<float>(pi);
  }
}

}  // namespace netopt
