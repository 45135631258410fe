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

#include "ineqforge/lean.hpp"
#include "ineqforge/problem.hpp"
#include "ineqforge/rng.hpp"

namespace ineqforge {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Verification outcome for one (problem, attempt) pair. compiled implies
/// neither a timeout nor an error excerpt.
struct EvalRecord {
  std::string problem_id;
  std::string attempt_id;
  bool compiled = false;
  double wall_time_s = 0.0;
  std::string error_excerpt;
  bool timeout = false;
  std::string corpus_label = "all";
};

EvalRecord make_record(std::string problem_id, std::string attempt_id,
                       bool compiled, double wall_time_s,
                       std::string error_excerpt, bool timeout,
                       std::string corpus_label = "all");

std::string record_to_json(const EvalRecord& r);
EvalRecord record_from_json(const std::string& line);

/// Pinned prover toolchain: a command that receives one .lean file argument,
/// compiles it against the pinned mathematics library, and exits zero on
/// success. The pin string is echoed into every report.
struct Toolchain {
  std::string command;
  std::string mathlib_pin = "unpinned";
};

/// Resolves the toolchain from an explicit flag value or the
/// INEQFORGE_LEAN_CMD environment variable; empty result means unconfigured.
std::optional<Toolchain> resolve_toolchain(const std::string& flag_value,
                                           const std::string& pin);

enum class VerifyMode { Proof, StatementOnly };

/// Compiles the artifact in an isolated scratch directory. compiled is true
/// iff the command exits zero and (in proof mode) the output carries no
/// placeholder warning; sorry detection scans compiler diagnostics, not the
/// source.
EvalRecord verify(const LeanArtifact& artifact, const Toolchain& toolchain,
                  double timeout_s = 300.0, VerifyMode mode = VerifyMode::Proof,
                  const std::string& problem_id = "?",
                  const std::string& attempt_id = "0");

/// One prover attempt to be verified.
struct Attempt {
  std::string problem_id;
  std::string attempt_id;
  std::string model;
  std::string proof_text;
  std::string corpus_label = "all";
};

std::vector<Attempt> load_attempts(const std::string& path);

struct ProverAdapter {
  enum class Kind { Command, Http } kind = Kind::Command;
  std::string endpoint_or_command;
  TemplateId template_id = TemplateId::Plain;
  double temperature = 1.0;
  int max_tokens = 16384;
  int attempts_per_problem = 1;
  std::string model = "prover";
};

struct BatchOptions {
  std::size_t workers = 1;
  std::string journal_path;  // empty -> no resumability
  double timeout_s = 300.0;
  VerifyMode mode = VerifyMode::Proof;
};

/// Verifies all attempts against the corresponding problems with a bounded
/// worker pool. Completed (problem, attempt) pairs found in the journal are
/// not re-verified; new results are appended to it. When an adapter is
/// given, attempts are collected from it first (command adapters get the
/// prompt on stdin and return one proof on stdout; http adapters speak an
/// OpenAI-style chat completions protocol). Resulting records are sorted by
/// (problem_id, attempt_id) and independent of worker count.
std::vector<EvalRecord> run_batch(const std::vector<Problem>& problems,
                                  std::vector<Attempt> attempts,
                                  const std::optional<ProverAdapter>& adapter,
                                  const Toolchain& toolchain,
                                  const BatchOptions& options);

/// pass@k for one budget: the standard unbiased per-problem estimate
/// 1 - C(n-c, k)/C(n, k), averaged over problems.
struct PassAtN {
  std::size_t k = 1;
  std::map<std::string, double> per_problem;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // id -> (n, c)
  double mean = 0.0;
};

PassAtN pass_at_k(const std::vector<EvalRecord>& records, std::size_t k);

/// Bootstrap dispersion: resample k attempts per problem without
/// replacement, score the corpus indicator mean, and report the standard
/// deviation across resamples. Deterministic under a fixed rng seed.
double dispersion(const std::vector<EvalRecord>& records, std::size_t k,
                  std::size_t resamples, Rng& rng);

struct ReportCell {
  std::string corpus;
  std::size_t k = 1;
  double mean = 0.0;      // fraction in [0, 1]
  double stddev = 0.0;    // fraction in [0, 1]
  std::size_t problems = 0;
};

/// Aligned text table with the accuracy and its subscripted deviation per
/// cell (52.0 with std 2.0 renders as 52.0₂.₀), rows grouped by corpus in
/// first-seen order, budgets ascending.
std::string render_report_text(const std::vector<ReportCell>& cells);
std::string render_report_json(const std::vector<ReportCell>& cells,
                               const std::string& mathlib_pin,
                               std::size_t resamples);

}  // namespace ineqforge
