// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/expr.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace ineqforge {

namespace {

void hash_mix(std::size_t& h, std::size_t v) {
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
}

}  // namespace

/// Process-wide intern pool. Children are interned before parents, so node
/// identity (and therefore whole-tree structural equality) reduces to
/// pointer equality.
class ExprPool {
 public:
  static ExprPool& instance() {
    static ExprPool pool;
    return pool;
  }

  ExprPtr make(ExprOp op, VarId var, Rational value, unsigned nat_exp,
               std::vector<ExprPtr> args) {
    Expr node;
    node.op_ = op;
    node.var_ = std::move(var);
    node.value_ = value;
    node.nat_exp_ = nat_exp;
    node.args_ = std::move(args);
    node.hash_ = hash_node(node);
    std::lock_guard<std::mutex> lock(mu_);
    auto [lo, hi] = pool_.equal_range(node.hash_);
    for (auto it = lo; it != hi;) {
      ExprPtr existing = it->second.lock();
      if (!existing) {
        it = pool_.erase(it);
        continue;
      }
      if (same_node(*existing, node)) return existing;
      ++it;
    }
    auto owned = std::shared_ptr<Expr>(new Expr(std::move(node)));
    pool_.emplace(owned->hash_, owned);
    return owned;
  }

 private:
  static std::size_t hash_node(const Expr& e) {
    std::size_t h = static_cast<std::size_t>(e.op_);
    hash_mix(h, std::hash<std::string>{}(e.var_.base));
    hash_mix(h, e.var_.idx);
    hash_mix(h, static_cast<std::size_t>(e.value_.num()));
    hash_mix(h, static_cast<std::size_t>(e.value_.den()));
    hash_mix(h, e.nat_exp_);
    for (const auto& a : e.args_) {
      hash_mix(h, std::hash<const Expr*>{}(a.get()));
    }
    return h;
  }

  static bool same_node(const Expr& a, const Expr& b) {
    if (a.op_ != b.op_ || a.nat_exp_ != b.nat_exp_ ||
        !(a.value_ == b.value_) || !(a.var_ == b.var_) ||
        a.args_.size() != b.args_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.args_.size(); ++i) {
      if (a.args_[i].get() != b.args_[i].get()) return false;
    }
    return true;
  }

  std::mutex mu_;
  std::unordered_multimap<std::size_t, std::weak_ptr<const Expr>> pool_;
};

namespace {

ExprPtr make(ExprOp op, std::vector<ExprPtr> args, VarId v = {},
             Rational value = Rational(0), unsigned nat_exp = 0) {
  return ExprPool::instance().make(op, std::move(v), value, nat_exp,
                                   std::move(args));
}

}  // namespace

ExprPtr var(VarId v) { return make(ExprOp::Var, {}, std::move(v)); }

ExprPtr var(const std::string& base, unsigned idx) {
  return var(VarId{base, idx});
}

ExprPtr constant(Rational r) { return make(ExprOp::Const, {}, {}, r); }

ExprPtr constant(std::int64_t num, std::int64_t den) {
  return constant(Rational(num, den));
}

ExprPtr add(std::vector<ExprPtr> args) {
  if (args.size() < 2) throw std::invalid_argument("add needs >= 2 operands");
  return make(ExprOp::Add, std::move(args));
}

ExprPtr mul(std::vector<ExprPtr> args) {
  if (args.size() < 2) throw std::invalid_argument("mul needs >= 2 operands");
  return make(ExprOp::Mul, std::move(args));
}

ExprPtr sub(ExprPtr l, ExprPtr r) {
  return make(ExprOp::Sub, {std::move(l), std::move(r)});
}

ExprPtr div(ExprPtr num, ExprPtr den) {
  if (den->is_const() && den->value().is_zero()) {
    throw std::invalid_argument("div by literal zero");
  }
  return make(ExprOp::Div, {std::move(num), std::move(den)});
}

ExprPtr pow_nat(ExprPtr base, unsigned exponent) {
  if (exponent < 1) throw std::invalid_argument("pow_nat exponent must be >= 1");
  return make(ExprOp::PowNat, {std::move(base)}, {}, Rational(0), exponent);
}

ExprPtr pow_real(ExprPtr base, Rational exponent) {
  return make(ExprOp::PowReal, {std::move(base)}, {}, exponent);
}

ExprPtr sqrt_e(ExprPtr arg) { return make(ExprOp::Sqrt, {std::move(arg)}); }
ExprPtr exp_e(ExprPtr arg) { return make(ExprOp::Exp, {std::move(arg)}); }
ExprPtr log_e(ExprPtr arg) { return make(ExprOp::Log, {std::move(arg)}); }
ExprPtr abs_e(ExprPtr arg) { return make(ExprOp::Abs, {std::move(arg)}); }
ExprPtr neg_e(ExprPtr arg) { return make(ExprOp::Neg, {std::move(arg)}); }
ExprPtr min_e(ExprPtr l, ExprPtr r) {
  return make(ExprOp::Min, {std::move(l), std::move(r)});
}
ExprPtr max_e(ExprPtr l, ExprPtr r) {
  return make(ExprOp::Max, {std::move(l), std::move(r)});
}

ExprPtr mul_fold(const ExprPtr& a, const ExprPtr& b) {
  if (a->is_const() && b->is_const()) {
    return constant(a->value() * b->value());
  }
  std::vector<ExprPtr> args;
  const auto splice = [&args](const ExprPtr& e) {
    if (e->op() == ExprOp::Mul) {
      args.insert(args.end(), e->args().begin(), e->args().end());
    } else {
      args.push_back(e);
    }
  };
  splice(a);
  splice(b);
  return mul(std::move(args));
}

ExprPtr add_fold(const ExprPtr& a, const ExprPtr& b) {
  if (a->is_const() && b->is_const()) {
    return constant(a->value() + b->value());
  }
  std::vector<ExprPtr> args;
  const auto splice = [&args](const ExprPtr& e) {
    if (e->op() == ExprOp::Add) {
      args.insert(args.end(), e->args().begin(), e->args().end());
    } else {
      args.push_back(e);
    }
  };
  splice(a);
  splice(b);
  return add(std::move(args));
}

namespace {

void collect_vars(const ExprPtr& e, std::set<VarId>& out) {
  if (e->op() == ExprOp::Var) {
    out.insert(e->var());
    return;
  }
  for (const auto& a : e->args()) collect_vars(a, out);
}

}  // namespace

std::set<VarId> free_vars(const ExprPtr& e) {
  std::set<VarId> out;
  collect_vars(e, out);
  return out;
}

namespace {

ExprPtr substitute_memo(const ExprPtr& e, const std::map<VarId, ExprPtr>& map,
                        std::unordered_map<const Expr*, ExprPtr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  ExprPtr result;
  switch (e->op()) {
    case ExprOp::Var: {
      auto it = map.find(e->var());
      result = it == map.end() ? e : it->second;
      break;
    }
    case ExprOp::Const:
      result = e;
      break;
    default: {
      std::vector<ExprPtr> args;
      args.reserve(e->args().size());
      bool changed = false;
      for (const auto& a : e->args()) {
        args.push_back(substitute_memo(a, map, memo));
        changed = changed || args.back().get() != a.get();
      }
      if (!changed) {
        result = e;
        break;
      }
      switch (e->op()) {
        case ExprOp::Add: result = add(std::move(args)); break;
        case ExprOp::Mul: result = mul(std::move(args)); break;
        case ExprOp::Sub: result = sub(args[0], args[1]); break;
        case ExprOp::Div: result = div(args[0], args[1]); break;
        case ExprOp::PowNat: result = pow_nat(args[0], e->nat_exp()); break;
        case ExprOp::PowReal: result = pow_real(args[0], e->real_exp()); break;
        case ExprOp::Sqrt: result = sqrt_e(args[0]); break;
        case ExprOp::Exp: result = exp_e(args[0]); break;
        case ExprOp::Log: result = log_e(args[0]); break;
        case ExprOp::Min: result = min_e(args[0], args[1]); break;
        case ExprOp::Max: result = max_e(args[0], args[1]); break;
        case ExprOp::Abs: result = abs_e(args[0]); break;
        case ExprOp::Neg: result = neg_e(args[0]); break;
        default: throw std::logic_error("unreachable");
      }
    }
  }
  memo.emplace(e.get(), result);
  return result;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::map<VarId, ExprPtr>& map) {
  if (map.empty()) return e;
  std::unordered_map<const Expr*, ExprPtr> memo;
  return substitute_memo(e, map, memo);
}

EvalValue EvalValue::of(double v) {
  // Overflow to infinity poisons everything downstream (1/inf collapses to
  // an exact 0 that looks like a tag violation), so any non-finite
  // intermediate counts as a domain fault.
  if (!std::isfinite(v)) return faulted();
  return EvalValue{v, false};
}

EvalValue eval_expr(const ExprPtr& e, const Env& env) {
  switch (e->op()) {
    case ExprOp::Var: {
      auto it = env.find(e->var());
      if (it == env.end()) {
        throw std::invalid_argument("eval_expr: unbound variable " +
                                    e->var().render());
      }
      return EvalValue::of(it->second);
    }
    case ExprOp::Const:
      return EvalValue::of(e->value().to_double());
    case ExprOp::Add: {
      double s = 0.0;
      for (const auto& a : e->args()) {
        EvalValue v = eval_expr(a, env);
        if (v.fault) return EvalValue::faulted();
        s += v.value;
      }
      return EvalValue::of(s);
    }
    case ExprOp::Mul: {
      double p = 1.0;
      for (const auto& a : e->args()) {
        EvalValue v = eval_expr(a, env);
        if (v.fault) return EvalValue::faulted();
        p *= v.value;
      }
      return EvalValue::of(p);
    }
    case ExprOp::Sub: {
      EvalValue l = eval_expr(e->args()[0], env);
      EvalValue r = eval_expr(e->args()[1], env);
      if (l.fault || r.fault) return EvalValue::faulted();
      return EvalValue::of(l.value - r.value);
    }
    case ExprOp::Div: {
      EvalValue l = eval_expr(e->args()[0], env);
      EvalValue r = eval_expr(e->args()[1], env);
      if (l.fault || r.fault || r.value == 0.0) return EvalValue::faulted();
      return EvalValue::of(l.value / r.value);
    }
    case ExprOp::PowNat: {
      EvalValue b = eval_expr(e->args()[0], env);
      if (b.fault) return EvalValue::faulted();
      return EvalValue::of(std::pow(b.value, static_cast<double>(e->nat_exp())));
    }
    case ExprOp::PowReal: {
      EvalValue b = eval_expr(e->args()[0], env);
      if (b.fault) return EvalValue::faulted();
      const Rational& x = e->real_exp();
      if (b.value < 0.0) return EvalValue::faulted();
      if (b.value == 0.0) {
        if (x.is_negative()) return EvalValue::faulted();
        return EvalValue::of(x.is_zero() ? 1.0 : 0.0);
      }
      return EvalValue::of(std::pow(b.value, x.to_double()));
    }
    case ExprOp::Sqrt: {
      EvalValue a = eval_expr(e->args()[0], env);
      if (a.fault || a.value < 0.0) return EvalValue::faulted();
      return EvalValue::of(std::sqrt(a.value));
    }
    case ExprOp::Exp: {
      EvalValue a = eval_expr(e->args()[0], env);
      if (a.fault) return EvalValue::faulted();
      return EvalValue::of(std::exp(a.value));
    }
    case ExprOp::Log: {
      EvalValue a = eval_expr(e->args()[0], env);
      if (a.fault || a.value <= 0.0) return EvalValue::faulted();
      return EvalValue::of(std::log(a.value));
    }
    case ExprOp::Min: {
      EvalValue l = eval_expr(e->args()[0], env);
      EvalValue r = eval_expr(e->args()[1], env);
      if (l.fault || r.fault) return EvalValue::faulted();
      return EvalValue::of(std::min(l.value, r.value));
    }
    case ExprOp::Max: {
      EvalValue l = eval_expr(e->args()[0], env);
      EvalValue r = eval_expr(e->args()[1], env);
      if (l.fault || r.fault) return EvalValue::faulted();
      return EvalValue::of(std::max(l.value, r.value));
    }
    case ExprOp::Abs: {
      EvalValue a = eval_expr(e->args()[0], env);
      if (a.fault) return EvalValue::faulted();
      return EvalValue::of(std::fabs(a.value));
    }
    case ExprOp::Neg: {
      EvalValue a = eval_expr(e->args()[0], env);
      if (a.fault) return EvalValue::faulted();
      return EvalValue::of(-a.value);
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<Rational> homogeneous_degree(const ExprPtr& e) {
  switch (e->op()) {
    case ExprOp::Var:
      return Rational(1);
    case ExprOp::Const:
      return Rational(0);
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Min:
    case ExprOp::Max: {
      std::optional<Rational> deg;
      for (const auto& a : e->args()) {
        auto d = homogeneous_degree(a);
        if (!d) return std::nullopt;
        if (!deg) {
          deg = d;
        } else if (!(*deg == *d)) {
          return std::nullopt;
        }
      }
      return deg;
    }
    case ExprOp::Mul: {
      Rational sum(0);
      for (const auto& a : e->args()) {
        auto d = homogeneous_degree(a);
        if (!d) return std::nullopt;
        sum = sum + *d;
      }
      return sum;
    }
    case ExprOp::Div: {
      auto n = homogeneous_degree(e->args()[0]);
      auto d = homogeneous_degree(e->args()[1]);
      if (!n || !d) return std::nullopt;
      return *n - *d;
    }
    case ExprOp::PowNat: {
      auto d = homogeneous_degree(e->args()[0]);
      if (!d) return std::nullopt;
      return *d * Rational(static_cast<std::int64_t>(e->nat_exp()));
    }
    case ExprOp::PowReal: {
      auto d = homogeneous_degree(e->args()[0]);
      if (!d) return std::nullopt;
      return *d * e->real_exp();
    }
    case ExprOp::Sqrt: {
      auto d = homogeneous_degree(e->args()[0]);
      if (!d) return std::nullopt;
      return *d * Rational(1, 2);
    }
    case ExprOp::Exp:
    case ExprOp::Log: {
      auto d = homogeneous_degree(e->args()[0]);
      if (d && d->is_zero()) return Rational(0);
      return std::nullopt;
    }
    case ExprOp::Abs:
    case ExprOp::Neg:
      return homogeneous_degree(e->args()[0]);
  }
  return std::nullopt;
}

}  // namespace ineqforge
