// Copyright (c) 2026 netopt authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace netopt {

// Fixed-point conversion used on both sides of the switch: the switch only
// adds 32-bit integers, so floats are scaled by 2^frac_bits before they
// enter the fabric and scaled back after aggregation. One static global
// scale; the clamp bound guarantees a sum of num_workers clamped values
// fits a signed 32-bit accumulator.
struct QuantConfig {
  int frac_bits = 20;
  int num_workers = 1;

  double scale() const { return std::ldexp(1.0, frac_bits); }

  // 2^(31-f)/N. A sum of N values clamped to this never overflows int32.
  double clamp_bound() const {
    return std::ldexp(1.0, 31 - frac_bits) / num_workers;
  }

  void validate() const {
    if (frac_bits < 1 || frac_bits > 28) {
      throw std::invalid_argument("quant.frac_bits must be in [1, 28]");
    }
    if (num_workers < 1) {
      throw std::invalid_argument("quant num_workers must be >= 1");
    }
  }
};

struct QuantResult {
  std::vector<std::int32_t> values;
  std::size_t clamp_count = 0;
};

// clamp to +/-bound, scale by 2^f, round to nearest even. The product is
// exact in double (power-of-two scaling), so nearbyint sees the true value.
inline std::int32_t to_fixed_scalar(float v, const QuantConfig& cfg,
                                    bool* clamped = nullptr) {
  const double bound = cfg.clamp_bound();
  double x = static_cast<double>(v);
  bool c = false;
  if (x > bound) {
    x = bound;
    c = true;
  } else if (x < -bound) {
    x = -bound;
    c = true;
  }
  double scaled = std::nearbyint(x * cfg.scale());
  // +bound lands exactly on 2^31/N; for N=1 that is one past INT32_MAX.
  if (scaled > std::numeric_limits<std::int32_t>::max()) {
    scaled = std::numeric_limits<std::int32_t>::max();
    c = true;
  }
  if (clamped) *clamped = c;
  return static_cast<std::int32_t>(scaled);
}

inline float from_fixed_scalar(std::int32_t v, const QuantConfig& cfg) {
  // Exact in double; the final narrowing to float rounds once.
  return static_cast<float>(static_cast<double>(v) / cfg.scale());
}

inline QuantResult to_fixed(std::span<const float> values,
                            const QuantConfig& cfg) {
  QuantResult r;
  r.values.reserve(values.size());
  for (float v : values) {
    bool c = false;
    r.values.push_back(to_fixed_scalar(v, cfg, &c));
    if (c) ++r.clamp_count;
  }
  return r;
}

inline std::vector<float> from_fixed(std::span<const std::int32_t> values,
                                     const QuantConfig& cfg) {
  std::vector<float> out;
  out.reserve(values.size());
  for (std::int32_t v : values) out.push_back(from_fixed_scalar(v, cfg));
  return out;
}

}  // namespace netopt
