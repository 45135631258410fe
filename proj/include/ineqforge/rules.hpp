// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ineqforge/problem.hpp"
#include "ineqforge/rng.hpp"

namespace ineqforge {

/// A rule guard refused the input; `guard()` names which one.
class RuleInapplicable : public std::runtime_error {
 public:
  RuleInapplicable(const std::string& rule, const std::string& guard,
                   const std::string& why)
      : std::runtime_error("rule '" + rule + "' inapplicable (" + guard +
                           "): " + why),
        guard_(guard) {}
  const std::string& guard() const { return guard_; }

 private:
  std::string guard_;
};

enum class RuleFamily { Composition, VariableLevel, ProblemLevel, TypeI, TypeII };

std::string family_name(RuleFamily f);
RuleFamily family_from_name(const std::string& s);

/// A named, guarded rewrite. Names are the exact catalogue strings
/// ("Direct Addition", "sqrt_all", "cyc_div_add", "log", ...) so provenance
/// traces are self-describing. The four two-problem combination rows that
/// exist both with and without the positive-RHS requirement appear twice,
/// distinguished by requires_positive_rhs.
struct TransformRule {
  std::string name;
  RuleFamily family = RuleFamily::Composition;
  int arity = 1;
  bool requires_positive_rhs = false;
  bool requires_basic_only = false;
  /// Fixed parameter overrides (mu, lambda, index, weight_min, weight_max).
  /// Anything absent is drawn from the rng at application time.
  std::map<std::string, std::string> parameters;
};

/// The 11 two-problem combination rules, catalogue order: the four
/// tag-agnostic rows, their positive variants, then Multiplication,
/// Division, Reciprocal.
const std::vector<TransformRule>& composition_rules();
/// The 18 variable substitution rules: 14 applicable under any assumptions
/// (shift, rep, sqrt/sq/cube/reciprocal/exp/log x all/random) and the 4
/// cyclic rules restricted to condition-free problems.
const std::vector<TransformRule>& variable_rules();
/// The 5 whole-statement rules: exp, cube (always), sqrt, sq, log
/// (positive RHS only).
const std::vector<TransformRule>& statement_rules();

/// The 14 variable rules applicable regardless of conditions.
const std::vector<TransformRule>& variable_rules_any_condition();

struct RuleOutcome {
  Problem problem;
  ProvEntry rule_trace;
};

/// Fresh-name policy for duplication and lifting: alphabet rotation
/// (x,y,z -> a,b,c -> u,v,w) with duplication-index bumping when the rotated
/// name is taken.
std::map<VarId, VarId> fresh_renaming(const std::vector<VarId>& to_rename,
                                      std::set<VarId> taken);

/// Renames variables throughout; identity, category, tag and provenance are
/// untouched (renaming is not a provenance event).
Problem rename_problem(const Problem& p, const std::map<VarId, VarId>& renaming);

/// Duplicates the seed with fresh variable names and combines the copies:
/// multiplied when the positive-RHS tag is set, added otherwise.
Problem type1_variant(const Problem& seed);

/// One-step variable substitution drawn from the named variable rule,
/// applied uniformly to statement and conditions.
Problem type2_variant(const Problem& seed, const std::string& subst_kind,
                      Rng& rng);

/// Aligns two problems onto one shared variable list (the union). When both
/// carry conditions and their used variables overlap, the clashing variables
/// of p2 are renamed fresh so the joint feasible region stays a product.
std::pair<Problem, Problem> lift(const Problem& p1, const Problem& p2);

/// Whether the combination feasibility guard admits the pair as given: at
/// least one side condition-free, or used variable sets disjoint.
bool combination_feasible(const Problem& p1, const Problem& p2);

RuleOutcome compose(const Problem& p1, const Problem& p2,
                    const TransformRule& rule, Rng& rng);
RuleOutcome apply_var_rule(const Problem& p, const TransformRule& rule,
                           Rng& rng);
RuleOutcome apply_stmt_rule(const Problem& p, const TransformRule& rule);

/// Exactly the rules whose guards pass, in catalogue order: combination
/// rules when p2 is given, variable + statement rules otherwise.
std::vector<TransformRule> applicable_rules(const Problem& p1,
                                            const Problem* p2 = nullptr);

std::string rule_slug(const std::string& rule_name);

}  // namespace ineqforge
