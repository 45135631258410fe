// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace ineqforge {

/// Deterministic 64-bit RNG used everywhere randomness is needed.
///
/// std::mt19937_64 has a fully specified algorithm, so streams are identical
/// across platforms. The std distributions are *not* specified, which is why
/// bounded draws are implemented here directly; the tiny modulo bias is
/// irrelevant next to byte-identical reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, n). Requires n > 0.
  std::size_t index(std::size_t n);

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t int_in(std::int64_t lo, std::int64_t hi);

  /// Uniform in [0, 1).
  double unit();

  /// Log-uniform in [lo, hi], lo, hi > 0.
  double log_uniform(double lo, double hi);

  /// Derive an independent child stream; advances this stream by one draw.
  Rng split();

 private:
  std::mt19937_64 eng_;
};

}  // namespace ineqforge
