// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace ineqforge {

namespace {

std::int64_t checked(__int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw std::overflow_error(std::string("rational overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = checked(-static_cast<__int128>(num), "negate");
    den = checked(-static_cast<__int128>(den), "negate");
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::operator+(const Rational& o) const {
  const __int128 n = static_cast<__int128>(num_) * o.den_ +
                     static_cast<__int128>(o.num_) * den_;
  const __int128 d = static_cast<__int128>(den_) * o.den_;
  return Rational(checked(n, "add"), checked(d, "add"));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  const __int128 n = static_cast<__int128>(num_) * o.num_;
  const __int128 d = static_cast<__int128>(den_) * o.den_;
  return Rational(checked(n, "mul"), checked(d, "mul"));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  const __int128 n = static_cast<__int128>(num_) * o.den_;
  const __int128 d = static_cast<__int128>(den_) * o.num_;
  return Rational(checked(n, "div"), checked(d, "div"));
}

Rational Rational::operator-() const {
  return Rational(checked(-static_cast<__int128>(num_), "neg"), den_);
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num_) * o.den_ <
         static_cast<__int128>(o.num_) * den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace ineqforge
