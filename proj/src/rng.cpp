// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ineqforge {

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index over empty range");
  return static_cast<std::size_t>(next_u64() % n);
}

std::int64_t Rng::int_in(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::int_in with hi < lo");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double Rng::unit() {
  // 53 high bits -> double in [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::log_uniform(double lo, double hi) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  return std::exp(a + unit() * (b - a));
}

Rng Rng::split() { return Rng(next_u64() ^ 0x9E3779B97F4A7C15ULL); }

}  // namespace ineqforge
