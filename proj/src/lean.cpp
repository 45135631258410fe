// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/lean.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ineqforge {

namespace {

// Rendered-form precedence. Comparisons sit below everything; function
// application and atoms bind tightest. Negative literals and unary minus get
// a floor value so they are parenthesized inside any arithmetic context.
constexpr int kPrecNeg = 5;
constexpr int kPrecCmp = 10;
constexpr int kPrecAdd = 20;
constexpr int kPrecMul = 30;
constexpr int kPrecPow = 40;
constexpr int kPrecApp = 90;
constexpr int kPrecAtom = 100;

std::string render_const(const Rational& r) {
  if (r.is_integer()) return std::to_string(r.num());
  return "(" + std::to_string(r.num()) + ":ℝ) / " + std::to_string(r.den());
}

int const_prec(const Rational& r) {
  if (r.is_integer()) return r.num() < 0 ? kPrecNeg : kPrecAtom;
  return kPrecMul;
}

struct Rendered {
  std::string text;
  int prec;
};

Rendered render(const ExprPtr& e);

std::string child(const ExprPtr& e, int min_prec) {
  Rendered r = render(e);
  if (r.prec < min_prec) return "(" + r.text + ")";
  return r.text;
}

std::string app_arg(const ExprPtr& e) { return child(e, kPrecAtom); }

std::string join_chain(const std::vector<ExprPtr>& args, const char* op,
                       int level) {
  std::string out = child(args[0], level);
  for (std::size_t i = 1; i < args.size(); ++i) {
    out += op;
    out += child(args[i], level + 1);
  }
  return out;
}

Rendered render(const ExprPtr& e) {
  switch (e->op()) {
    case ExprOp::Var:
      return {e->var().render(), kPrecAtom};
    case ExprOp::Const:
      return {render_const(e->value()), const_prec(e->value())};
    case ExprOp::Add:
      return {join_chain(e->args(), " + ", kPrecAdd), kPrecAdd};
    case ExprOp::Mul:
      return {join_chain(e->args(), " * ", kPrecMul), kPrecMul};
    case ExprOp::Sub:
      return {child(e->args()[0], kPrecAdd) + " - " +
                  child(e->args()[1], kPrecAdd + 1),
              kPrecAdd};
    case ExprOp::Div:
      return {child(e->args()[0], kPrecMul) + " / " +
                  child(e->args()[1], kPrecMul + 1),
              kPrecMul};
    case ExprOp::PowNat:
      return {child(e->args()[0], kPrecPow + 1) + " ^ " +
                  std::to_string(e->nat_exp()),
              kPrecPow};
    case ExprOp::PowReal:
      return {child(e->args()[0], kPrecPow + 1) + " ^ (" +
                  render_const(e->real_exp()) + ")",
              kPrecPow};
    case ExprOp::Sqrt:
      return {"Real.sqrt " + app_arg(e->args()[0]), kPrecApp};
    case ExprOp::Exp:
      return {"Real.exp " + app_arg(e->args()[0]), kPrecApp};
    case ExprOp::Log:
      return {"Real.log " + app_arg(e->args()[0]), kPrecApp};
    case ExprOp::Min:
      return {"min " + app_arg(e->args()[0]) + " " + app_arg(e->args()[1]),
              kPrecApp};
    case ExprOp::Max:
      return {"max " + app_arg(e->args()[0]) + " " + app_arg(e->args()[1]),
              kPrecApp};
    case ExprOp::Abs:
      return {"|" + render(e->args()[0]).text + "|", kPrecAtom};
    case ExprOp::Neg:
      return {"-" + app_arg(e->args()[0]), kPrecNeg};
  }
  throw std::logic_error("unreachable");
}

std::string subscript_digits(std::size_t n) {
  static const char* kSub[10] = {"₀", "₁", "₂", "₃",
                                 "₄", "₅", "₆", "₇",
                                 "₈", "₉"};
  std::string digits = std::to_string(n);
  std::string out;
  for (char c : digits) out += kSub[c - '0'];
  return out;
}

std::string hypothesis_name(std::size_t index1, bool ascii) {
  if (ascii) return "h" + std::to_string(index1);
  return "h" + subscript_digits(index1);
}

std::string sanitize_theorem_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = "p" + out;
  }
  return out;
}

std::string cond_op(CondKind k) {
  switch (k) {
    case CondKind::Eq: return " = ";
    case CondKind::Gt: return " > ";
    case CondKind::Ge: return " ≥ ";
  }
  throw std::logic_error("unreachable");
}

std::string indent_block(const std::string& body) {
  std::istringstream in(body);
  std::string out, line;
  while (std::getline(in, line)) {
    out += "  " + line + "\n";
  }
  if (out.empty()) out = "  " + body + "\n";
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string render_expr_lean(const ExprPtr& e) { return render(e).text; }

std::string LeanArtifact::statement_line() const {
  return "theorem " + theorem_name + " " + binders + " : " + goal + " := by";
}

std::string LeanArtifact::file_text() const {
  if (theorem_override) {
    const std::string block = trimmed(*theorem_override);
    if (block.rfind("import", 0) == 0) return block + "\n";
    return preamble + "\n" + block + "\n";
  }
  return preamble + "\n" + statement_line() + "\n" + indent_block(proof_body);
}

LeanArtifact render_statement(const Problem& p, const RenderStyle& style) {
  LeanArtifact art;
  art.preamble = kLeanPreamble;
  art.theorem_name = sanitize_theorem_name(p.id);

  std::string binders = "(";
  for (std::size_t i = 0; i < p.variables.size(); ++i) {
    if (i) binders += " ";
    binders += p.variables[i].render();
  }
  binders += " : ℝ)";

  if (style.conjunction_positivity) {
    binders += " (hpos : ";
    for (std::size_t i = 0; i < p.variables.size(); ++i) {
      if (i) binders += " ∧ ";
      binders += p.variables[i].render() + " > 0";
    }
    binders += ")";
  } else {
    for (const auto& v : p.variables) {
      binders += " (h" + v.render() + " : " + v.render() + " > 0)";
    }
  }
  for (std::size_t i = 0; i < p.conditions.size(); ++i) {
    const Condition& c = p.conditions[i];
    binders += " (" + hypothesis_name(i + 1, style.ascii_hypothesis_names) +
               " : " + render_expr_lean(c.lhs) + cond_op(c.kind) +
               render_expr_lean(c.rhs) + ")";
  }
  art.binders = std::move(binders);

  // Statements are stored lhs >= rhs; a bare-constant lhs reads better (and
  // matches the corpus layout) flipped onto the right of a <=.
  if (p.lhs->is_const()) {
    art.goal = render_expr_lean(p.rhs) + " ≤ " + render_expr_lean(p.lhs);
  } else {
    art.goal = render_expr_lean(p.lhs) + " ≥ " + render_expr_lean(p.rhs);
  }
  return art;
}

std::string template_name(TemplateId id) {
  switch (id) {
    case TemplateId::Plain: return "plain";
    case TemplateId::ChatThinking: return "chat-thinking";
    case TemplateId::KiminaStyle: return "kimina-style";
    case TemplateId::Icl: return "icl";
    case TemplateId::IclGen: return "icl-gen";
  }
  throw std::logic_error("unreachable");
}

TemplateId template_from_name(const std::string& name) {
  if (name == "plain") return TemplateId::Plain;
  if (name == "chat-thinking") return TemplateId::ChatThinking;
  if (name == "kimina-style") return TemplateId::KiminaStyle;
  if (name == "icl") return TemplateId::Icl;
  if (name == "icl-gen") return TemplateId::IclGen;
  throw TemplateError("unknown template id '" + name + "'");
}

bool template_uses_chat(TemplateId id) { return id != TemplateId::Plain; }

namespace {

const char* kAnswerFence =
    "```lean4\n"
    "<You answer>\n"
    "```\n";

const char* kIclTrust =
    "Following is the solution for a related problem written in Lean 4. "
    "You can fully trust the provided code and it has already passed the "
    "Lean 4 compilation.\n";

const char* kIclClosing =
    "Please follow the provided code such that you don't make more mistakes. "
    "Your code should be self-contained, i.e., you should first prove the "
    "provided example inside your whole proof (not as a separate theorem "
    "outside the proof of the problem) if you want to use the result. "
    "You should wrap your answer in the lean code block\n";

std::string fenced_problem(const PromptTask& task) {
  return "```lean4\n" + std::string(kLeanPreamble) + "\n" +
         task.informal_prefix.value_or("") + task.formal_statement;
}

}  // namespace

std::string render_prompt(const PromptTask& task) {
  if (task.formal_statement.empty()) {
    throw TemplateError("missing formal_statement slot");
  }
  switch (task.template_id) {
    case TemplateId::Plain:
      return "Complete the following Lean 4 code with explanatory comments "
             "preceding each line of code:\n\n" +
             fenced_problem(task) + "\n";
    case TemplateId::ChatThinking:
      return "Give a proof for the following problem written in lean 4:\n\n" +
             fenced_problem(task) +
             "```.\n\n"
             "You should wrap your answer in the lean code block\n\n" +
             kAnswerFence;
    case TemplateId::KiminaStyle:
      return "Think about and solve the following problem step by step in "
             "Lean 4.\n"
             "# Informal statement:\n" +
             task.informal_prefix.value_or("") +
             "\n# Formal statement:\n"
             "```lean4\n" +
             std::string(kLeanPreamble) + "\n" + task.formal_statement +
             "```\n";
    case TemplateId::Icl: {
      if (task.icl_proofs.empty()) {
        throw TemplateError("icl template requires at least 1 proof");
      }
      return "Give a proof for the following problem written in lean 4:\n\n" +
             fenced_problem(task) + "```.\n\n" + kIclTrust +
             task.icl_proofs[0] + "\n\n" + kIclClosing + "\n" + kAnswerFence;
    }
    case TemplateId::IclGen: {
      if (task.icl_proofs.size() != 2) {
        throw TemplateError("icl-gen template requires exactly 2 proofs");
      }
      return "Give a proof for the following problem written in lean 4:\n\n" +
             fenced_problem(task) + "```.\n\n" + kIclTrust +
             task.icl_proofs[0] + "\n\n" + task.icl_proofs[1] + "\n\n" +
             kIclClosing + "\n" + kAnswerFence;
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

std::string extract_first_code_block(const std::string& text) {
  const std::size_t open = text.find("```");
  if (open == std::string::npos) {
    throw ExtractionError("no extractable code block");
  }
  const std::size_t content = text.find('\n', open);
  if (content == std::string::npos) {
    throw ExtractionError("unterminated code block");
  }
  const std::size_t close = text.find("```", content + 1);
  if (close == std::string::npos) {
    throw ExtractionError("unterminated code block");
  }
  const std::string block = trimmed(text.substr(content + 1, close - content - 1));
  if (block.empty()) throw ExtractionError("empty code block");
  return block;
}

}  // namespace

LeanArtifact assemble_candidate(const Problem& p, const std::string& proof_body,
                                const RenderStyle& style) {
  const std::string body = trimmed(proof_body);
  if (body.empty()) throw ExtractionError("empty candidate proof");

  LeanArtifact art = render_statement(p, style);
  if (body.find("```") != std::string::npos) {
    art.theorem_override = extract_first_code_block(body);
    return art;
  }
  if (body == "by" || body.rfind("by ", 0) == 0 || body.rfind("by\n", 0) == 0) {
    const std::string tactics = trimmed(body.substr(2));
    if (tactics.empty()) throw ExtractionError("empty tactic proof");
    art.proof_body = tactics;
    return art;
  }
  throw ExtractionError("no extractable code block");
}

}  // namespace ineqforge
