// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/corpus.hpp"

#include <fstream>
#include <functional>

#include "json.hpp"

namespace ineqforge {

namespace {

using Json = nlohmann::ordered_json;

Json expr_to_json(const ExprPtr& e) {
  Json j;
  switch (e->op()) {
    case ExprOp::Var:
      j["op"] = "var";
      j["base"] = e->var().base;
      j["idx"] = e->var().idx;
      return j;
    case ExprOp::Const:
      j["op"] = "const";
      j["num"] = e->value().num();
      j["den"] = e->value().den();
      return j;
    case ExprOp::PowNat:
      j["op"] = "pown";
      j["exp"] = e->nat_exp();
      break;
    case ExprOp::PowReal:
      j["op"] = "powr";
      j["num"] = e->real_exp().num();
      j["den"] = e->real_exp().den();
      break;
    case ExprOp::Add: j["op"] = "add"; break;
    case ExprOp::Mul: j["op"] = "mul"; break;
    case ExprOp::Sub: j["op"] = "sub"; break;
    case ExprOp::Div: j["op"] = "div"; break;
    case ExprOp::Sqrt: j["op"] = "sqrt"; break;
    case ExprOp::Exp: j["op"] = "exp"; break;
    case ExprOp::Log: j["op"] = "log"; break;
    case ExprOp::Min: j["op"] = "min"; break;
    case ExprOp::Max: j["op"] = "max"; break;
    case ExprOp::Abs: j["op"] = "abs"; break;
    case ExprOp::Neg: j["op"] = "neg"; break;
  }
  Json args = Json::array();
  for (const auto& a : e->args()) args.push_back(expr_to_json(a));
  j["args"] = std::move(args);
  return j;
}

std::int64_t require_int(const Json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    throw ParseError("missing or non-integer field '" + field + "'");
  }
  return j[field].get<std::int64_t>();
}

std::string require_string(const Json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw ParseError("missing or non-string field '" + field + "'");
  }
  return j[field].get<std::string>();
}

void check_arity(const std::string& op, std::size_t got, std::size_t lo,
                 std::size_t hi) {
  if (got < lo || got > hi) {
    throw ParseError("op '" + op + "' with " + std::to_string(got) +
                     " args");
  }
}

ExprPtr expr_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("expression is not an object");
  const std::string op = require_string(j, "op");
  if (op == "var") {
    const std::int64_t idx = j.contains("idx") ? require_int(j, "idx") : 0;
    if (idx < 0) throw ParseError("negative variable idx");
    return var(require_string(j, "base"), static_cast<unsigned>(idx));
  }
  if (op == "const") {
    return constant(Rational(require_int(j, "num"), require_int(j, "den")));
  }
  std::vector<ExprPtr> args;
  if (!j.contains("args") || !j["args"].is_array()) {
    throw ParseError("op '" + op + "' missing args array");
  }
  for (const auto& a : j["args"]) args.push_back(expr_from_json(a));
  const std::size_t n = args.size();
  if (op == "add") { check_arity(op, n, 2, SIZE_MAX); return add(std::move(args)); }
  if (op == "mul") { check_arity(op, n, 2, SIZE_MAX); return mul(std::move(args)); }
  if (op == "sub") { check_arity(op, n, 2, 2); return sub(args[0], args[1]); }
  if (op == "div") { check_arity(op, n, 2, 2); return div(args[0], args[1]); }
  if (op == "pown") {
    check_arity(op, n, 1, 1);
    const std::int64_t k = require_int(j, "exp");
    if (k < 1) throw ParseError("pown exponent must be >= 1");
    return pow_nat(args[0], static_cast<unsigned>(k));
  }
  if (op == "powr") {
    check_arity(op, n, 1, 1);
    return pow_real(args[0],
                    Rational(require_int(j, "num"), require_int(j, "den")));
  }
  if (op == "sqrt") { check_arity(op, n, 1, 1); return sqrt_e(args[0]); }
  if (op == "exp") { check_arity(op, n, 1, 1); return exp_e(args[0]); }
  if (op == "log") { check_arity(op, n, 1, 1); return log_e(args[0]); }
  if (op == "min") { check_arity(op, n, 2, 2); return min_e(args[0], args[1]); }
  if (op == "max") { check_arity(op, n, 2, 2); return max_e(args[0], args[1]); }
  if (op == "abs") { check_arity(op, n, 1, 1); return abs_e(args[0]); }
  if (op == "neg") { check_arity(op, n, 1, 1); return neg_e(args[0]); }
  throw ParseError("unknown op '" + op + "'");
}

std::string cond_kind_name(CondKind k) {
  switch (k) {
    case CondKind::Eq: return "eq";
    case CondKind::Gt: return "gt";
    case CondKind::Ge: return "ge";
  }
  throw std::logic_error("unreachable");
}

CondKind cond_kind_from(const std::string& s) {
  if (s == "eq") return CondKind::Eq;
  if (s == "gt") return CondKind::Gt;
  if (s == "ge") return CondKind::Ge;
  throw ParseError("unknown condition kind '" + s + "'");
}

Problem problem_from_json(const Json& j) {
  Problem p;
  p.id = require_string(j, "id");
  p.category = category_from_name(require_string(j, "category"));
  if (!j.contains("variables") || !j["variables"].is_array()) {
    throw ParseError(p.id + ": missing variables array");
  }
  for (const auto& v : j["variables"]) {
    if (v.contains("type") && v["type"] != "real") {
      throw ParseError(p.id + ": variable with non-real type");
    }
    if (v.contains("positive") && v["positive"].is_boolean() &&
        !v["positive"].get<bool>()) {
      throw SemanticError(p.id + ": variable without basic positivity");
    }
    const std::int64_t idx = v.contains("idx") ? require_int(v, "idx") : 0;
    if (idx < 0) throw ParseError(p.id + ": negative variable idx");
    p.variables.push_back(
        VarId{require_string(v, "base"), static_cast<unsigned>(idx)});
  }
  if (j.contains("conditions")) {
    if (!j["conditions"].is_array()) {
      throw ParseError(p.id + ": conditions is not an array");
    }
    for (const auto& c : j["conditions"]) {
      Condition cond;
      cond.kind = cond_kind_from(require_string(c, "kind"));
      if (!c.contains("lhs") || !c.contains("rhs")) {
        throw ParseError(p.id + ": condition missing lhs/rhs");
      }
      cond.lhs = expr_from_json(c["lhs"]);
      cond.rhs = expr_from_json(c["rhs"]);
      p.conditions.push_back(std::move(cond));
    }
  }
  if (!j.contains("lhs") || !j.contains("rhs")) {
    throw ParseError(p.id + ": missing statement lhs/rhs");
  }
  p.lhs = expr_from_json(j["lhs"]);
  p.rhs = expr_from_json(j["rhs"]);
  if (!j.contains("rhs_positive") || !j["rhs_positive"].is_boolean()) {
    throw ParseError(p.id + ": missing boolean rhs_positive");
  }
  p.rhs_positive = j["rhs_positive"].get<bool>();
  if (j.contains("provenance")) {
    if (!j["provenance"].is_array()) {
      throw ParseError(p.id + ": provenance is not an array");
    }
    for (const auto& e : j["provenance"]) {
      ProvEntry entry;
      entry.rule = require_string(e, "rule");
      if (e.contains("parents")) {
        for (const auto& par : e["parents"]) {
          entry.parents.push_back(par.get<std::string>());
        }
      }
      if (e.contains("params")) {
        for (auto it = e["params"].begin(); it != e["params"].end(); ++it) {
          entry.params[it.key()] = it.value().get<std::string>();
        }
      }
      p.provenance.push_back(std::move(entry));
    }
  }
  if (j.contains("lean_proof")) {
    p.lean_proof = j["lean_proof"].get<std::string>();
  }
  validate_problem(p);
  return p;
}

Json problem_to_json(const Problem& p) {
  Json j;
  j["id"] = p.id;
  j["category"] = category_name(p.category);
  Json vars = Json::array();
  for (const auto& v : p.variables) {
    Json jv;
    jv["base"] = v.base;
    jv["idx"] = v.idx;
    vars.push_back(std::move(jv));
  }
  j["variables"] = std::move(vars);
  Json conds = Json::array();
  for (const auto& c : p.conditions) {
    Json jc;
    jc["kind"] = cond_kind_name(c.kind);
    jc["lhs"] = expr_to_json(c.lhs);
    jc["rhs"] = expr_to_json(c.rhs);
    conds.push_back(std::move(jc));
  }
  j["conditions"] = std::move(conds);
  j["lhs"] = expr_to_json(p.lhs);
  j["rhs"] = expr_to_json(p.rhs);
  j["rhs_positive"] = p.rhs_positive;
  Json prov = Json::array();
  for (const auto& e : p.provenance) {
    Json je;
    je["rule"] = e.rule;
    je["parents"] = e.parents;
    Json params;  // std::map iteration gives sorted, stable key order
    for (const auto& [k, v] : e.params) params[k] = v;
    je["params"] = std::move(params);
    prov.push_back(std::move(je));
  }
  j["provenance"] = std::move(prov);
  if (p.lean_proof) j["lean_proof"] = *p.lean_proof;
  return j;
}

Json parse_json_line(const std::string& line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON");
  return j;
}

bool json_contains_nary_op(const Json& j) {
  if (j.is_object()) {
    if (j.contains("op") && j["op"].is_string()) {
      const std::string op = j["op"].get<std::string>();
      if (op == "sum" || op == "prod" || op == "bigop") return true;
    }
    for (const auto& [k, v] : j.items()) {
      (void)k;
      if (json_contains_nary_op(v)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (json_contains_nary_op(v)) return true;
    }
  }
  return false;
}

}  // namespace

Problem parse_problem(const std::string& record) {
  return problem_from_json(parse_json_line(record));
}

std::string serialize_problem(const Problem& p) {
  return problem_to_json(p).dump();
}

std::variant<Problem, SeedRejection> try_parse_seed(const std::string& record) {
  Json j;
  try {
    j = parse_json_line(record);
  } catch (const ParseError& e) {
    return SeedRejection{"?", "schema", e.what()};
  }
  const std::string id =
      j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "?";
  if (j.contains("variables") && j["variables"].is_array()) {
    for (const auto& v : j["variables"]) {
      if (v.is_object() && v.contains("type") && v["type"] != "real") {
        return SeedRejection{id, "integer-parameter",
                             "variable with non-real type"};
      }
    }
    for (const auto& v : j["variables"]) {
      if (v.is_object() && v.contains("positive") &&
          v["positive"].is_boolean() && !v["positive"].get<bool>()) {
        return SeedRejection{id, "basic-assumption",
                             "variable without basic positivity"};
      }
    }
  }
  if (json_contains_nary_op(j)) {
    return SeedRejection{id, "n-variable",
                         "record uses an n-ary family operator"};
  }
  try {
    return problem_from_json(j);
  } catch (const std::exception& e) {
    return SeedRejection{id, "schema", e.what()};
  }
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file '" + path + "'");
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      Json j = parse_json_line(line);
      if (j.is_object() && j.contains("meta")) {
        corpus.meta_line = line;
        continue;
      }
      corpus.problems.push_back(problem_from_json(j));
    } catch (const std::exception& e) {
      throw ParseError(path + ": line " + std::to_string(lineno) + ": " +
                       e.what());
    }
  }
  return corpus;
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file '" + path + "'");
  if (corpus.meta_line) out << *corpus.meta_line << "\n";
  for (const auto& p : corpus.problems) out << serialize_problem(p) << "\n";
}

std::vector<std::string> load_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("meta")) continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace ineqforge
