// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/problem.hpp"

#include <algorithm>
#include <set>

namespace ineqforge {

std::string category_name(Category c) {
  switch (c) {
    case Category::Amgm: return "amgm";
    case Category::Cauchy: return "cauchy";
    case Category::Misc: return "misc";
    case Category::Real: return "real";
    case Category::Generated: return "generated";
  }
  throw std::logic_error("unreachable");
}

Category category_from_name(const std::string& s) {
  if (s == "amgm") return Category::Amgm;
  if (s == "cauchy") return Category::Cauchy;
  if (s == "misc") return Category::Misc;
  if (s == "real") return Category::Real;
  if (s == "generated") return Category::Generated;
  throw ParseError("unknown category '" + s + "'");
}

bool same_statement(const Problem& a, const Problem& b) {
  return a.variables == b.variables && a.conditions == b.conditions &&
         a.lhs.get() == b.lhs.get() && a.rhs.get() == b.rhs.get() &&
         a.rhs_positive == b.rhs_positive;
}

std::set<VarId> used_vars(const Problem& p) {
  std::set<VarId> used = free_vars(p.lhs);
  used.merge(free_vars(p.rhs));
  for (const auto& c : p.conditions) {
    used.merge(free_vars(c.lhs));
    used.merge(free_vars(c.rhs));
  }
  return used;
}

void validate_problem(const Problem& p, bool allow_unused) {
  if (p.id.empty()) throw SemanticError("problem with empty id");
  if (!p.lhs || !p.rhs) throw SemanticError(p.id + ": missing statement side");
  if (p.variables.empty()) throw SemanticError(p.id + ": no variables");

  std::set<VarId> declared(p.variables.begin(), p.variables.end());
  if (declared.size() != p.variables.size()) {
    throw SemanticError(p.id + ": duplicate variable declaration");
  }
  std::set<std::string> rendered;
  for (const auto& v : p.variables) {
    if (v.base.empty()) throw SemanticError(p.id + ": empty variable name");
    if (!rendered.insert(v.render()).second) {
      throw SemanticError(p.id + ": variable rendering collision on '" +
                          v.render() + "'");
    }
  }

  const std::set<VarId> used = used_vars(p);
  for (const auto& v : used) {
    if (!declared.count(v)) {
      throw SemanticError(p.id + ": undeclared variable '" + v.render() + "'");
    }
  }
  if (!allow_unused) {
    for (const auto& v : declared) {
      if (!used.count(v)) {
        throw SemanticError(p.id + ": unused declared variable '" +
                            v.render() + "'");
      }
    }
  }
}

}  // namespace ineqforge
