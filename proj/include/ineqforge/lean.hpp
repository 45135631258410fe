// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineqforge/problem.hpp"

namespace ineqforge {

/// Header shared by every emitted file and prompt: Mathlib + Aesop imports,
/// no heartbeat limit, the usual opens.
inline constexpr const char* kLeanPreamble =
    "import Mathlib\n"
    "import Aesop\n"
    "\n"
    "set_option maxHeartbeats 0\n"
    "\n"
    "open BigOperators Real Nat Topology Rat\n";

struct RenderStyle {
  /// One conjunction hypothesis (hpos : x > 0 ∧ y > 0 ∧ ...) instead of the
  /// default per-variable binders.
  bool conjunction_positivity = false;
  /// h1, h2 hypothesis names instead of h₁, h₂ for toolchains with encoding
  /// trouble.
  bool ascii_hypothesis_names = false;
};

struct LeanArtifact {
  std::string preamble;
  std::string theorem_name;
  std::string binders;
  std::string goal;
  std::string proof_body = "sorry";  // tactic script, without the "by"

  /// When set (extracted model output), file_text() uses this verbatim
  /// theorem block instead of the rendered statement.
  std::optional<std::string> theorem_override;

  /// "theorem <name> <binders> : <goal> := by"
  std::string statement_line() const;
  /// Complete compilable file.
  std::string file_text() const;
};

/// Deterministic Lean 4 statement for a problem. Layout rules: variables as
/// one real-typed binder group in declaration order, positivity hypotheses,
/// then conditions as numbered hypotheses; parenthesization is explicit
/// except for left-associated chains at the same precedence; a goal whose
/// lhs is a bare constant is emitted flipped as `rhs ≤ lhs`.
LeanArtifact render_statement(const Problem& p, const RenderStyle& style = {});

/// Expression layer of the renderer, exposed for tests.
std::string render_expr_lean(const ExprPtr& e);

enum class TemplateId { Plain, ChatThinking, KiminaStyle, Icl, IclGen };

std::string template_name(TemplateId id);
TemplateId template_from_name(const std::string& name);
/// Whether the adapter is expected to apply the model chat template (with
/// generation prompt) around this prompt.
bool template_uses_chat(TemplateId id);

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PromptTask {
  TemplateId template_id = TemplateId::Plain;
  std::optional<std::string> informal_prefix;
  std::string formal_statement;
  std::vector<std::string> icl_proofs;
};

/// Byte-exact instantiation of the evaluation prompt templates.
std::string render_prompt(const PromptTask& task);

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds the full compilable file for a candidate proof. Accepts either a
/// bare tactic proof starting with `by`, or a model answer containing a
/// fenced lean code block (the first block is extracted and used verbatim,
/// keeping its own theorem header). Anything else is an extraction error.
LeanArtifact assemble_candidate(const Problem& p, const std::string& proof_body,
                                const RenderStyle& style = {});

}  // namespace ineqforge
