// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ineqforge/rational.hpp"

namespace ineqforge {

/// Variable identity: a base name plus a duplication index. Index 0 is the
/// original; k > 0 renders as base followed by k (x, 1) -> "x1". Index
/// arithmetic is what the shift/rep renamings operate on.
struct VarId {
  std::string base;
  unsigned idx = 0;

  std::string render() const {
    return idx == 0 ? base : base + std::to_string(idx);
  }
  bool operator==(const VarId& o) const {
    return idx == o.idx && base == o.base;
  }
  bool operator<(const VarId& o) const {
    if (base != o.base) return base < o.base;
    return idx < o.idx;
  }
};

enum class ExprOp {
  Var,
  Const,
  Add,
  Mul,
  Sub,
  Div,
  PowNat,
  PowReal,
  Sqrt,
  Exp,
  Log,
  Min,
  Max,
  Abs,
  Neg,
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Nodes are hash-consed through the factory
/// functions below, so structural equality of whole trees is pointer
/// equality. Never construct an Expr directly.
class Expr {
 public:
  ExprOp op() const { return op_; }
  const VarId& var() const { return var_; }
  const Rational& value() const { return value_; }    // Const payload
  unsigned nat_exp() const { return nat_exp_; }       // PowNat exponent
  const Rational& real_exp() const { return value_; } // PowReal exponent
  const std::vector<ExprPtr>& args() const { return args_; }
  std::size_t hash() const { return hash_; }

  bool is_const() const { return op_ == ExprOp::Const; }

 private:
  Expr() = default;
  friend class ExprPool;

  ExprOp op_ = ExprOp::Const;
  VarId var_;
  Rational value_;
  unsigned nat_exp_ = 0;
  std::vector<ExprPtr> args_;
  std::size_t hash_ = 0;
};

// Factories. Invariants are enforced here: add/mul take >= 2 operands, the
// div denominator may not be the literal zero constant, pow_nat exponents
// are >= 1. Violations throw std::invalid_argument.
ExprPtr var(VarId v);
ExprPtr var(const std::string& base, unsigned idx = 0);
ExprPtr constant(Rational r);
ExprPtr constant(std::int64_t num, std::int64_t den = 1);
ExprPtr add(std::vector<ExprPtr> args);
ExprPtr mul(std::vector<ExprPtr> args);
ExprPtr sub(ExprPtr l, ExprPtr r);
ExprPtr div(ExprPtr num, ExprPtr den);
ExprPtr pow_nat(ExprPtr base, unsigned exponent);
ExprPtr pow_real(ExprPtr base, Rational exponent);
ExprPtr sqrt_e(ExprPtr arg);
ExprPtr exp_e(ExprPtr arg);
ExprPtr log_e(ExprPtr arg);
ExprPtr min_e(ExprPtr l, ExprPtr r);
ExprPtr max_e(ExprPtr l, ExprPtr r);
ExprPtr abs_e(ExprPtr arg);
ExprPtr neg_e(ExprPtr arg);

/// Product that folds a constant*constant pair into one constant and splices
/// nested products into a flat operand list. Used by the multiply-style
/// combinations so 4 * 4 becomes 16 and chained products stay chains.
ExprPtr mul_fold(const ExprPtr& a, const ExprPtr& b);
/// Sum with the same constant-folding/flattening behaviour.
ExprPtr add_fold(const ExprPtr& a, const ExprPtr& b);

/// Exact set of variables occurring in e.
std::set<VarId> free_vars(const ExprPtr& e);

/// Simultaneous, capture-free substitution. Variables missing from the map
/// are left untouched.
ExprPtr substitute(const ExprPtr& e, const std::map<VarId, ExprPtr>& map);

/// Result of numeric evaluation: either a double (possibly +-inf) or a
/// domain fault (log/sqrt outside their domain, division by zero, NaN).
struct EvalValue {
  double value = 0.0;
  bool fault = false;

  static EvalValue faulted() { return EvalValue{0.0, true}; }
  static EvalValue of(double v);
};

using Env = std::map<VarId, double>;

/// IEEE-style evaluation; faults propagate to the root instead of throwing.
EvalValue eval_expr(const ExprPtr& e, const Env& env);

/// Formal degree of e when it is homogeneous in its variables (var = 1,
/// const = 0, mul sums, pow scales, sqrt halves). Returns nothing for
/// non-homogeneous shapes (exp, log, mixed-degree sums).
std::optional<Rational> homogeneous_degree(const ExprPtr& e);

}  // namespace ineqforge
