// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ineqforge/problem.hpp"

namespace ineqforge {

inline constexpr const char* kVersion = "0.1.0";

/// Parses one corpus JSONL record into a Problem. Throws ParseError for
/// schema violations (naming the field) and SemanticError for records that
/// are well-formed but break the problem invariants.
Problem parse_problem(const std::string& record);

/// Canonical, deterministic record bytes (no trailing newline). Structurally
/// equal problems serialize byte-identically, and
/// parse_problem(serialize_problem(p)) is structurally equal to p.
std::string serialize_problem(const Problem& p);

/// A corpus file: optional metadata header line (kept verbatim) plus records.
struct Corpus {
  std::optional<std::string> meta_line;
  std::vector<Problem> problems;
};

/// Loads a JSONL corpus; errors name the file and 1-based line number.
Corpus load_corpus(const std::string& path);

/// Writes meta line (if any) followed by one canonical record per line.
void save_corpus(const std::string& path, const Corpus& corpus);

/// Why a record cannot serve as a seed problem.
struct SeedRejection {
  std::string id;      // record id when recoverable, else "line <n>"
  std::string reason;  // integer-parameter | n-variable | basic-assumption | schema
  std::string detail;
};

/// Lenient probe used by seed filtering: either the parsed problem or the
/// reason the record is ineligible. Records may carry per-variable "type"
/// and "positive" extensions that the strict schema cannot represent; those
/// are classified here instead of crashing the pipeline.
std::variant<Problem, SeedRejection> try_parse_seed(const std::string& record);

/// Reads raw JSONL lines (meta header skipped), for record-level filtering.
std::vector<std::string> load_lines(const std::string& path);

}  // namespace ineqforge
