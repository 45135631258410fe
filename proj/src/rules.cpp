// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/rules.hpp"

#include <algorithm>
#include <cctype>

namespace ineqforge {

std::string family_name(RuleFamily f) {
  switch (f) {
    case RuleFamily::Composition: return "composition";
    case RuleFamily::VariableLevel: return "variable-level";
    case RuleFamily::ProblemLevel: return "problem-level";
    case RuleFamily::TypeI: return "typeI";
    case RuleFamily::TypeII: return "typeII";
  }
  throw std::logic_error("unreachable");
}

RuleFamily family_from_name(const std::string& s) {
  if (s == "composition") return RuleFamily::Composition;
  if (s == "variable-level") return RuleFamily::VariableLevel;
  if (s == "problem-level") return RuleFamily::ProblemLevel;
  if (s == "typeI") return RuleFamily::TypeI;
  if (s == "typeII") return RuleFamily::TypeII;
  throw std::invalid_argument("unknown rule family '" + s + "'");
}

namespace {

TransformRule comp_rule(const char* name, bool positive) {
  TransformRule r;
  r.name = name;
  r.family = RuleFamily::Composition;
  r.arity = 2;
  r.requires_positive_rhs = positive;
  return r;
}

TransformRule var_rule(const char* name, bool basic_only) {
  TransformRule r;
  r.name = name;
  r.family = RuleFamily::VariableLevel;
  r.arity = 1;
  r.requires_basic_only = basic_only;
  return r;
}

TransformRule stmt_rule(const char* name, bool positive) {
  TransformRule r;
  r.name = name;
  r.family = RuleFamily::ProblemLevel;
  r.arity = 1;
  r.requires_positive_rhs = positive;
  return r;
}

}  // namespace

const std::vector<TransformRule>& composition_rules() {
  static const std::vector<TransformRule> rules = {
      comp_rule("Direct Addition", false),
      comp_rule("Weighted Sum", false),
      comp_rule("Maxima", false),
      comp_rule("Minima", false),
      comp_rule("Direct Addition", true),
      comp_rule("Weighted Sum", true),
      comp_rule("Maxima", true),
      comp_rule("Minima", true),
      comp_rule("Multiplication", true),
      comp_rule("Division", true),
      comp_rule("Reciprocal", true),
  };
  return rules;
}

const std::vector<TransformRule>& variable_rules() {
  static const std::vector<TransformRule> rules = {
      var_rule("shift", false),
      var_rule("rep", false),
      var_rule("sqrt_all", false),
      var_rule("sqrt_random", false),
      var_rule("sq_all", false),
      var_rule("sq_random", false),
      var_rule("cube_all", false),
      var_rule("cube_random", false),
      var_rule("reciprocal_all", false),
      var_rule("reciprocal_random", false),
      var_rule("exp_all", false),
      var_rule("exp_random", false),
      var_rule("log_all", false),
      var_rule("log_random", false),
      var_rule("cyc_add", true),
      var_rule("cyc_mul", true),
      var_rule("cyc_div", true),
      var_rule("cyc_div_add", true),
  };
  return rules;
}

const std::vector<TransformRule>& variable_rules_any_condition() {
  static const std::vector<TransformRule> rules = [] {
    std::vector<TransformRule> out;
    for (const auto& r : variable_rules()) {
      if (!r.requires_basic_only) out.push_back(r);
    }
    return out;
  }();
  return rules;
}

const std::vector<TransformRule>& statement_rules() {
  static const std::vector<TransformRule> rules = {
      stmt_rule("exp", false),
      stmt_rule("cube", false),
      stmt_rule("sqrt", true),
      stmt_rule("sq", true),
      stmt_rule("log", true),
  };
  return rules;
}

std::string rule_slug(const std::string& rule_name) {
  std::string out;
  for (char c : rule_name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += '_';
    }
  }
  return out;
}

std::map<VarId, VarId> fresh_renaming(const std::vector<VarId>& to_rename,
                                      std::set<VarId> taken) {
  static const std::map<std::string, std::string> kRotation = {
      {"x", "a"}, {"y", "b"}, {"z", "c"},
      {"a", "u"}, {"b", "v"}, {"c", "w"},
  };
  std::set<std::string> taken_names;
  for (const auto& v : taken) taken_names.insert(v.render());

  std::map<VarId, VarId> renaming;
  for (const auto& v : to_rename) {
    VarId cand = v;
    if (auto it = kRotation.find(v.base); it != kRotation.end()) {
      cand.base = it->second;
    }
    while (taken.count(cand) || taken_names.count(cand.render())) {
      cand.idx += 1;
    }
    taken.insert(cand);
    taken_names.insert(cand.render());
    renaming[v] = cand;
  }
  return renaming;
}

Problem rename_problem(const Problem& p,
                       const std::map<VarId, VarId>& renaming) {
  std::map<VarId, ExprPtr> subst;
  for (const auto& [from, to] : renaming) subst[from] = var(to);

  Problem out = p;
  out.variables.clear();
  for (const auto& v : p.variables) {
    auto it = renaming.find(v);
    out.variables.push_back(it == renaming.end() ? v : it->second);
  }
  out.lhs = substitute(p.lhs, subst);
  out.rhs = substitute(p.rhs, subst);
  out.conditions.clear();
  for (const auto& c : p.conditions) {
    out.conditions.push_back(
        Condition{c.kind, substitute(c.lhs, subst), substitute(c.rhs, subst)});
  }
  return out;
}

Problem type1_variant(const Problem& seed) {
  const std::set<VarId> taken(seed.variables.begin(), seed.variables.end());
  const auto renaming = fresh_renaming(seed.variables, taken);
  const Problem copy = rename_problem(seed, renaming);

  Problem out;
  out.id = seed.id + "_t1";
  out.category = seed.category;
  out.variables = seed.variables;
  out.variables.insert(out.variables.end(), copy.variables.begin(),
                       copy.variables.end());
  out.conditions = seed.conditions;
  out.conditions.insert(out.conditions.end(), copy.conditions.begin(),
                        copy.conditions.end());
  if (seed.rhs_positive) {
    out.lhs = mul_fold(seed.lhs, copy.lhs);
    out.rhs = mul_fold(seed.rhs, copy.rhs);
    out.rhs_positive = true;
  } else {
    out.lhs = add_fold(seed.lhs, copy.lhs);
    out.rhs = add_fold(seed.rhs, copy.rhs);
    out.rhs_positive = false;
  }
  out.provenance = seed.provenance;
  ProvEntry entry;
  entry.rule = "typeI";
  entry.parents = {seed.id};
  entry.params["branch"] = seed.rhs_positive ? "multiply" : "add";
  out.provenance.push_back(std::move(entry));
  validate_problem(out);
  return out;
}

Problem type2_variant(const Problem& seed, const std::string& subst_kind,
                      Rng& rng) {
  const TransformRule* rule = nullptr;
  for (const auto& r : variable_rules()) {
    if (r.name == subst_kind) {
      rule = &r;
      break;
    }
  }
  if (!rule) {
    throw std::invalid_argument("unknown variable rule '" + subst_kind + "'");
  }
  RuleOutcome outcome = apply_var_rule(seed, *rule, rng);
  Problem out = std::move(outcome.problem);
  out.id = seed.id + "_t2";
  out.category = seed.category;
  ProvEntry entry = std::move(outcome.rule_trace);
  entry.params["rule"] = subst_kind;
  entry.rule = "typeII";
  out.provenance.back() = std::move(entry);
  return out;
}

bool combination_feasible(const Problem& p1, const Problem& p2) {
  if (p1.conditions.empty() || p2.conditions.empty()) return true;
  const std::set<VarId> u1 = used_vars(p1);
  const std::set<VarId> u2 = used_vars(p2);
  for (const auto& v : u2) {
    if (u1.count(v)) return false;
  }
  return true;
}

std::pair<Problem, Problem> lift(const Problem& p1, const Problem& p2) {
  Problem q2 = p2;
  if (!p1.conditions.empty() && !p2.conditions.empty()) {
    const std::set<VarId> u1 = used_vars(p1);
    std::vector<VarId> clashing;
    for (const auto& v : p2.variables) {
      if (u1.count(v)) clashing.push_back(v);
    }
    if (!clashing.empty()) {
      std::set<VarId> taken(p1.variables.begin(), p1.variables.end());
      taken.insert(p2.variables.begin(), p2.variables.end());
      q2 = rename_problem(p2, fresh_renaming(clashing, std::move(taken)));
    }
  }

  std::vector<VarId> shared = p1.variables;
  std::set<VarId> present(shared.begin(), shared.end());
  for (const auto& v : q2.variables) {
    if (present.insert(v).second) shared.push_back(v);
  }
  Problem l1 = p1;
  l1.variables = shared;
  q2.variables = shared;
  validate_problem(l1, /*allow_unused=*/true);
  validate_problem(q2, /*allow_unused=*/true);
  return {std::move(l1), std::move(q2)};
}

namespace {

std::vector<ProvEntry> merged_provenance(const Problem& p1, const Problem& p2) {
  std::vector<ProvEntry> merged = p1.provenance;
  for (const auto& e : p2.provenance) {
    if (std::find(merged.begin(), merged.end(), e) == merged.end()) {
      merged.push_back(e);
    }
  }
  return merged;
}

std::int64_t param_or(const TransformRule& rule, const std::string& key,
                      std::int64_t fallback) {
  auto it = rule.parameters.find(key);
  if (it == rule.parameters.end()) return fallback;
  return std::stoll(it->second);
}

}  // namespace

RuleOutcome compose(const Problem& p1, const Problem& p2,
                    const TransformRule& rule, Rng& rng) {
  if (rule.family != RuleFamily::Composition) {
    throw std::invalid_argument("compose with non-combination rule '" +
                                rule.name + "'");
  }
  if (p1.id == p2.id) {
    throw RuleInapplicable(rule.name, "feasibility",
                           "self-combination without fresh lifting");
  }
  if (!combination_feasible(p1, p2)) {
    throw RuleInapplicable(rule.name, "feasibility",
                           "both inputs conditioned on overlapping variables");
  }
  if (rule.requires_positive_rhs && !(p1.rhs_positive && p2.rhs_positive)) {
    throw RuleInapplicable(rule.name, "positivity",
                           "both inputs must carry the positive-RHS tag");
  }

  Problem out;
  out.category = Category::Generated;
  out.variables = p1.variables;
  {
    std::set<VarId> present(out.variables.begin(), out.variables.end());
    for (const auto& v : p2.variables) {
      if (present.insert(v).second) out.variables.push_back(v);
    }
  }
  out.conditions = p1.conditions;
  out.conditions.insert(out.conditions.end(), p2.conditions.begin(),
                        p2.conditions.end());
  out.rhs_positive = p1.rhs_positive && p2.rhs_positive;

  ProvEntry entry;
  entry.rule = rule.name;
  entry.parents = {p1.id, p2.id};
  if (rule.name == "Direct Addition" || rule.name == "Weighted Sum" ||
      rule.name == "Maxima" || rule.name == "Minima") {
    entry.params["variant"] = rule.requires_positive_rhs ? "positive" : "plain";
  }

  const ExprPtr& f1 = p1.lhs;
  const ExprPtr& g1 = p1.rhs;
  const ExprPtr& f2 = p2.lhs;
  const ExprPtr& g2 = p2.rhs;
  const ExprPtr one = constant(1);

  if (rule.name == "Direct Addition") {
    out.lhs = add_fold(f1, f2);
    out.rhs = add_fold(g1, g2);
  } else if (rule.name == "Weighted Sum") {
    const std::int64_t wmin = param_or(rule, "weight_min", 1);
    const std::int64_t wmax = param_or(rule, "weight_max", 5);
    std::int64_t mu = param_or(rule, "mu", 0);
    std::int64_t lambda = param_or(rule, "lambda", 0);
    if (mu == 0) mu = rng.int_in(wmin, wmax);
    if (lambda == 0) lambda = rng.int_in(wmin, wmax);
    out.lhs = add({mul({constant(mu), f1}), mul({constant(lambda), f2})});
    out.rhs = add({mul({constant(mu), g1}), mul({constant(lambda), g2})});
    entry.params["mu"] = std::to_string(mu);
    entry.params["lambda"] = std::to_string(lambda);
  } else if (rule.name == "Maxima") {
    out.lhs = max_e(f1, f2);
    out.rhs = max_e(g1, g2);
  } else if (rule.name == "Minima") {
    out.lhs = min_e(f1, f2);
    out.rhs = min_e(g1, g2);
  } else if (rule.name == "Multiplication") {
    out.lhs = mul_fold(f1, f2);
    out.rhs = mul_fold(g1, g2);
  } else if (rule.name == "Division") {
    out.lhs = div(f1, g2);
    out.rhs = div(g1, f2);
  } else if (rule.name == "Reciprocal") {
    out.lhs = add({div(one, g1), div(one, g2)});
    out.rhs = add({div(one, f1), div(one, f2)});
  } else {
    throw std::invalid_argument("unknown combination rule '" + rule.name + "'");
  }

  out.provenance = merged_provenance(p1, p2);
  out.provenance.push_back(entry);
  out.id = p1.id + "_" + rule_slug(rule.name);
  validate_problem(out);
  return RuleOutcome{std::move(out), std::move(entry)};
}

namespace {

ExprPtr var_subst_image(const std::string& rule_name, const ExprPtr& v) {
  if (rule_name.rfind("sqrt", 0) == 0) return sqrt_e(v);
  if (rule_name.rfind("sq", 0) == 0) return pow_nat(v, 2);
  if (rule_name.rfind("cube", 0) == 0) return pow_nat(v, 3);
  if (rule_name.rfind("reciprocal", 0) == 0) return div(constant(1), v);
  if (rule_name.rfind("exp", 0) == 0) return sub(exp_e(v), constant(1));
  if (rule_name.rfind("log", 0) == 0) return log_e(add({constant(1), v}));
  throw std::logic_error("no substitution image for rule " + rule_name);
}

ExprPtr cyc_image(const std::string& rule_name, const ExprPtr& vi,
                  const ExprPtr& vj) {
  if (rule_name == "cyc_add") return add({vi, vj});
  if (rule_name == "cyc_mul") return mul({vi, vj});
  if (rule_name == "cyc_div") return div(vi, vj);
  if (rule_name == "cyc_div_add") return div(vi, add({vi, vj}));
  throw std::logic_error("no cyclic image for rule " + rule_name);
}

Problem substitute_problem(const Problem& p,
                           const std::map<VarId, ExprPtr>& subst) {
  Problem out = p;
  out.lhs = substitute(p.lhs, subst);
  out.rhs = substitute(p.rhs, subst);
  out.conditions.clear();
  for (const auto& c : p.conditions) {
    out.conditions.push_back(
        Condition{c.kind, substitute(c.lhs, subst), substitute(c.rhs, subst)});
  }
  return out;
}

}  // namespace

RuleOutcome apply_var_rule(const Problem& p, const TransformRule& rule,
                           Rng& rng) {
  if (rule.family != RuleFamily::VariableLevel) {
    throw std::invalid_argument("apply_var_rule with non-variable rule '" +
                                rule.name + "'");
  }
  if (rule.requires_basic_only && !p.conditions.empty()) {
    throw RuleInapplicable(rule.name, "basic-only",
                           "input carries further conditions");
  }
  const std::size_t m = p.variables.size();
  if (rule.requires_basic_only && m < 2) {
    throw RuleInapplicable(rule.name, "arity",
                           "cyclic rules need at least 2 variables");
  }

  ProvEntry entry;
  entry.rule = rule.name;
  entry.parents = {p.id};

  Problem out;
  if (rule.name == "shift" || rule.name == "rep") {
    const unsigned bump =
        rule.name == "shift" ? 1u : static_cast<unsigned>(m);
    std::map<VarId, VarId> renaming;
    for (const auto& v : p.variables) {
      renaming[v] = VarId{v.base, v.idx + bump};
    }
    out = rename_problem(p, renaming);
  } else if (rule.requires_basic_only) {
    std::map<VarId, ExprPtr> subst;
    for (std::size_t i = 0; i < m; ++i) {
      const ExprPtr vi = var(p.variables[i]);
      const ExprPtr vj = var(p.variables[(i + 1) % m]);
      subst[p.variables[i]] = cyc_image(rule.name, vi, vj);
    }
    out = substitute_problem(p, subst);
  } else if (rule.name.size() > 7 &&
             rule.name.substr(rule.name.size() - 7) == "_random") {
    std::size_t index;
    if (auto it = rule.parameters.find("index"); it != rule.parameters.end()) {
      index = static_cast<std::size_t>(std::stoull(it->second));
      if (index >= m) {
        throw std::invalid_argument("fixed index out of range for rule '" +
                                    rule.name + "'");
      }
    } else {
      index = rng.index(m);
    }
    const VarId& chosen = p.variables[index];
    std::map<VarId, ExprPtr> subst;
    subst[chosen] = var_subst_image(rule.name, var(chosen));
    out = substitute_problem(p, subst);
    entry.params["index"] = std::to_string(index);
    entry.params["variable"] = chosen.render();
  } else {
    std::map<VarId, ExprPtr> subst;
    for (const auto& v : p.variables) {
      subst[v] = var_subst_image(rule.name, var(v));
    }
    out = substitute_problem(p, subst);
  }

  out.id = p.id + "_" + rule_slug(rule.name);
  out.category = Category::Generated;
  // Every substituted image is strictly positive on positive inputs, so the
  // tag survives all variable rules.
  out.rhs_positive = p.rhs_positive;
  out.provenance = p.provenance;
  out.provenance.push_back(entry);
  validate_problem(out);
  return RuleOutcome{std::move(out), std::move(entry)};
}

RuleOutcome apply_stmt_rule(const Problem& p, const TransformRule& rule) {
  if (rule.family != RuleFamily::ProblemLevel) {
    throw std::invalid_argument("apply_stmt_rule with non-statement rule '" +
                                rule.name + "'");
  }
  if (rule.requires_positive_rhs && !p.rhs_positive) {
    throw RuleInapplicable(rule.name, "positivity",
                           "input lacks the positive-RHS tag");
  }

  Problem out = p;
  if (rule.name == "exp") {
    out.lhs = exp_e(p.lhs);
    out.rhs = exp_e(p.rhs);
    out.rhs_positive = true;
  } else if (rule.name == "cube") {
    out.lhs = pow_nat(p.lhs, 3);
    out.rhs = pow_nat(p.rhs, 3);
    out.rhs_positive = p.rhs_positive;
  } else if (rule.name == "sqrt") {
    out.lhs = sqrt_e(p.lhs);
    out.rhs = sqrt_e(p.rhs);
    out.rhs_positive = true;
  } else if (rule.name == "sq") {
    out.lhs = pow_nat(p.lhs, 2);
    out.rhs = pow_nat(p.rhs, 2);
    out.rhs_positive = true;
  } else if (rule.name == "log") {
    out.lhs = log_e(p.lhs);
    out.rhs = log_e(p.rhs);
    // log of a value in (0, 1] is nonpositive, so the tag is dropped.
    out.rhs_positive = false;
  } else {
    throw std::invalid_argument("unknown statement rule '" + rule.name + "'");
  }

  ProvEntry entry;
  entry.rule = rule.name;
  entry.parents = {p.id};
  out.id = p.id + "_" + rule_slug(rule.name);
  out.category = Category::Generated;
  out.provenance = p.provenance;
  out.provenance.push_back(entry);
  validate_problem(out);
  return RuleOutcome{std::move(out), std::move(entry)};
}

std::vector<TransformRule> applicable_rules(const Problem& p1,
                                            const Problem* p2) {
  std::vector<TransformRule> out;
  if (p2) {
    if (p1.id == p2->id || !combination_feasible(p1, *p2)) return out;
    for (const auto& r : composition_rules()) {
      if (r.requires_positive_rhs && !(p1.rhs_positive && p2->rhs_positive)) {
        continue;
      }
      out.push_back(r);
    }
    return out;
  }
  for (const auto& r : variable_rules()) {
    if (r.requires_basic_only &&
        (!p1.conditions.empty() || p1.variables.size() < 2)) {
      continue;
    }
    out.push_back(r);
  }
  for (const auto& r : statement_rules()) {
    if (r.requires_positive_rhs && !p1.rhs_positive) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace ineqforge
