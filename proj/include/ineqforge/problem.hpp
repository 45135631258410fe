// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineqforge/expr.hpp"

namespace ineqforge {

/// A malformed corpus record (bad JSON shape, unknown op, bad field type).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed record that violates the problem invariants (undeclared
/// variable, unused variable, missing positivity, ...).
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CondKind { Eq, Gt, Ge };

/// A further assumption beyond the implied positivity of every variable.
/// Basic positivity (x > 0) is never stored as a Condition; it holds for
/// every declared variable by construction.
struct Condition {
  CondKind kind = CondKind::Eq;
  ExprPtr lhs;
  ExprPtr rhs;

  bool operator==(const Condition& o) const {
    return kind == o.kind && lhs.get() == o.lhs.get() &&
           rhs.get() == o.rhs.get();
  }
};

enum class Category { Amgm, Cauchy, Misc, Real, Generated };

std::string category_name(Category c);
Category category_from_name(const std::string& s);

/// One applied rule in a provenance trace. `parents` are the ids of the
/// problems the rule consumed; parameters (weights, chosen index, rule
/// variant) are recorded as strings for stable serialization.
struct ProvEntry {
  std::string rule;
  std::vector<std::string> parents;
  std::map<std::string, std::string> params;

  bool operator==(const ProvEntry& o) const {
    return rule == o.rule && parents == o.parents && params == o.params;
  }
};

/// An inequality problem: fixed variable list (all implicitly positive),
/// optional further conditions, statement lhs >= rhs, and the positive-RHS
/// tag asserting rhs > 0 on the whole feasible region.
struct Problem {
  std::string id;
  Category category = Category::Generated;
  std::vector<VarId> variables;
  std::vector<Condition> conditions;
  ExprPtr lhs;
  ExprPtr rhs;
  bool rhs_positive = false;
  std::vector<ProvEntry> provenance;
  std::optional<std::string> lean_proof;
};

/// Structural equality of the mathematical statement: variables, conditions,
/// both sides and the tag. Ids, category and provenance are bookkeeping and
/// do not participate.
bool same_statement(const Problem& a, const Problem& b);

/// Checks the Problem invariants and throws SemanticError on violation.
/// `allow_unused` relaxes the no-unused-declared-variable rule for the
/// aligned intermediates produced by lift(), whose halves intentionally
/// mention only their own variables.
void validate_problem(const Problem& p, bool allow_unused = false);

/// Set of variables mentioned anywhere in the statement or conditions.
std::set<VarId> used_vars(const Problem& p);

}  // namespace ineqforge
