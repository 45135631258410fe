// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace ineqforge {

namespace {

constexpr double kRangeLo = 1e-3;
constexpr double kRangeHi = 1e3;
constexpr double kCondTol = 1e-12;
constexpr std::size_t kDetailCap = 10;

struct CondGroup {
  std::vector<const Condition*> equalities;
  std::vector<const Condition*> inequalities;
  std::set<VarId> vars;
};

std::set<VarId> condition_vars(const Condition& c) {
  std::set<VarId> vars = free_vars(c.lhs);
  vars.merge(free_vars(c.rhs));
  return vars;
}

/// Conditions sharing variables must be satisfied jointly; group them by
/// connected components.
std::vector<CondGroup> group_conditions(const Problem& p) {
  std::vector<CondGroup> groups;
  for (const auto& c : p.conditions) {
    std::set<VarId> vars = condition_vars(c);
    std::vector<std::size_t> touching;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (const auto& v : vars) {
        if (groups[i].vars.count(v)) {
          touching.push_back(i);
          break;
        }
      }
    }
    if (touching.empty()) {
      groups.emplace_back();
      touching.push_back(groups.size() - 1);
    }
    CondGroup& target = groups[touching.front()];
    for (std::size_t k = touching.size(); k-- > 1;) {
      CondGroup& other = groups[touching[k]];
      target.equalities.insert(target.equalities.end(),
                               other.equalities.begin(), other.equalities.end());
      target.inequalities.insert(target.inequalities.end(),
                                 other.inequalities.begin(),
                                 other.inequalities.end());
      target.vars.insert(other.vars.begin(), other.vars.end());
      groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(touching[k]));
    }
    if (c.kind == CondKind::Eq) {
      target.equalities.push_back(&c);
    } else {
      target.inequalities.push_back(&c);
    }
    target.vars.insert(vars.begin(), vars.end());
  }
  return groups;
}

/// Normal form F(x) = c of an equality condition.
struct EqForm {
  ExprPtr f;
  double target = 0.0;
  bool target_positive = false;
};

EqForm normal_form(const Condition& c) {
  if (c.rhs->is_const()) {
    return {c.lhs, c.rhs->value().to_double(), c.rhs->value().is_positive()};
  }
  if (c.lhs->is_const()) {
    return {c.rhs, c.lhs->value().to_double(), c.lhs->value().is_positive()};
  }
  return {sub(c.lhs, c.rhs), 0.0, false};
}

double eval_or_nan(const ExprPtr& e, const Env& env) {
  EvalValue v = eval_expr(e, env);
  return v.fault ? std::numeric_limits<double>::quiet_NaN() : v.value;
}

/// Solves F(env with pivot=t) = target by monotone bisection in log space.
/// Returns false when no bracket with a sign change is found.
bool bisect_pivot(const ExprPtr& f, double target, const VarId& pivot,
                  Env& env) {
  constexpr int kGrid = 48;
  const double ulo = std::log(1e-9);
  const double uhi = std::log(1e9);

  double prev_u = 0.0, prev_h = std::numeric_limits<double>::quiet_NaN();
  double lo = 0.0, hi = 0.0;
  bool have_bracket = false;
  for (int i = 0; i <= kGrid; ++i) {
    const double u = ulo + (uhi - ulo) * i / kGrid;
    env[pivot] = std::exp(u);
    const double h = eval_or_nan(f, env) - target;
    if (std::isfinite(h)) {
      if (h == 0.0) return true;
      if (std::isfinite(prev_h) && ((prev_h < 0.0) != (h < 0.0))) {
        lo = prev_u;
        hi = u;
        have_bracket = true;
        break;
      }
      prev_u = u;
      prev_h = h;
    }
  }
  if (!have_bracket) return false;

  double hlo;
  env[pivot] = std::exp(lo);
  hlo = eval_or_nan(f, env) - target;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    env[pivot] = std::exp(mid);
    const double hm = eval_or_nan(f, env) - target;
    if (!std::isfinite(hm)) return false;
    if (hm == 0.0) return true;
    if ((hm < 0.0) == (hlo < 0.0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  env[pivot] = std::exp(0.5 * (lo + hi));
  return std::fabs(eval_or_nan(f, env) - target) <= kCondTol;
}

/// Homogeneous scaling: F(s*x) = s^d F(x), so s = (c / F(x))^(1/d). A short
/// fixed-point polish absorbs rounding.
bool scale_solution(const ExprPtr& f, double target, const Rational& degree,
                    const std::set<VarId>& vars, Env& env) {
  const double d = degree.to_double();
  for (int polish = 0; polish < 4; ++polish) {
    const double f0 = eval_or_nan(f, env);
    if (!std::isfinite(f0) || f0 <= 0.0) return false;
    if (std::fabs(f0 - target) <= kCondTol) return true;
    const double s = std::pow(target / f0, 1.0 / d);
    if (!std::isfinite(s) || s <= 0.0) return false;
    for (const auto& v : vars) env[v] *= s;
  }
  return std::fabs(eval_or_nan(f, env) - target) <= kCondTol;
}

bool inequality_holds(const Condition& c, const Env& env) {
  const double lhs = eval_or_nan(c.lhs, env);
  const double rhs = eval_or_nan(c.rhs, env);
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) return false;
  return c.kind == CondKind::Gt ? lhs > rhs : lhs >= rhs;
}

/// One attempt at satisfying a condition group; draws for the group's
/// variables are written into env.
bool satisfy_group(const CondGroup& group, Env& env, Rng& rng, int narrowing) {
  const double lo = kRangeLo * std::pow(10.0, narrowing);
  const double hi = kRangeHi * std::pow(10.0, -narrowing);
  for (const auto& v : group.vars) env[v] = rng.log_uniform(lo, hi);

  std::set<VarId> pinned;
  for (const Condition* c : group.equalities) {
    const EqForm form = normal_form(*c);
    std::set<VarId> fvars = free_vars(form.f);
    std::vector<VarId> unpinned;
    for (const auto& v : fvars) {
      if (!pinned.count(v)) unpinned.push_back(v);
    }
    if (unpinned.empty()) {
      if (std::fabs(eval_or_nan(form.f, env) - form.target) > kCondTol) {
        return false;
      }
      continue;
    }
    bool solved = false;
    if (pinned.empty() && form.target_positive) {
      if (auto deg = homogeneous_degree(form.f); deg && !deg->is_zero()) {
        solved = scale_solution(form.f, form.target, *deg, fvars, env);
      }
    }
    if (!solved) {
      solved = bisect_pivot(form.f, form.target, unpinned.front(), env);
    }
    if (!solved) return false;
    pinned.insert(fvars.begin(), fvars.end());
  }

  for (const auto& [v, x] : env) {
    (void)v;
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  for (const Condition* c : group.inequalities) {
    if (!inequality_holds(*c, env)) return false;
  }
  for (const Condition* c : group.equalities) {
    if (std::fabs(eval_or_nan(c->lhs, env) - eval_or_nan(c->rhs, env)) >
        kCondTol) {
      return false;
    }
  }
  return true;
}

}  // namespace

FeasibleSamples sample_feasible(const Problem& p, Rng& rng, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_feasible needs n >= 1");
  const std::vector<CondGroup> groups = group_conditions(p);
  std::set<VarId> conditioned;
  for (const auto& g : groups) conditioned.insert(g.vars.begin(), g.vars.end());

  FeasibleSamples out;
  const std::size_t budget = 10 * n;
  while (out.envs.size() < n && out.attempted < budget) {
    ++out.attempted;
    const int narrowing = static_cast<int>((out.attempted * 3) / (budget + 1));
    Env env;
    for (const auto& v : p.variables) {
      if (!conditioned.count(v)) env[v] = rng.log_uniform(kRangeLo, kRangeHi);
    }
    bool ok = true;
    for (const auto& g : groups) {
      if (!satisfy_group(g, env, rng, narrowing)) {
        ok = false;
        break;
      }
    }
    if (ok) out.envs.push_back(std::move(env));
  }
  out.exhausted = out.envs.empty();
  return out;
}

SampleReport check_problem(const Problem& p, Rng& rng, std::size_t n,
                           double rel_tol) {
  if (n < 1) throw std::invalid_argument("check_problem needs n >= 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");

  SampleReport report;
  report.problem_id = p.id;
  FeasibleSamples samples = sample_feasible(p, rng, n);
  report.attempted = samples.attempted;
  report.accepted = samples.envs.size();
  report.feasibility_exhausted = samples.exhausted;

  for (const auto& env : samples.envs) {
    const EvalValue lv = eval_expr(p.lhs, env);
    const EvalValue rv = eval_expr(p.rhs, env);
    if (lv.fault || rv.fault || !std::isfinite(lv.value) ||
        !std::isfinite(rv.value)) {
      ++report.domain_faults;
      continue;
    }
    if (p.rhs_positive && rv.value <= 0.0) {
      ++report.tag_violation_count;
      if (report.tag_violations.size() < kDetailCap) {
        report.tag_violations.push_back(
            OracleViolation{env, lv.value, rv.value, rv.value});
      }
    }
    const double threshold =
        rv.value - rel_tol * std::fabs(rv.value) - 1e-12;
    if (lv.value < threshold) {
      ++report.violation_count;
      if (report.violations.size() < kDetailCap) {
        report.violations.push_back(
            OracleViolation{env, lv.value, rv.value, lv.value - rv.value});
      }
    }
  }
  return report;
}

}  // namespace ineqforge
