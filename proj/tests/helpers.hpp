// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ineqforge/corpus.hpp"
#include "ineqforge/problem.hpp"

namespace testutil {

inline std::string data_dir() { return INEQFORGE_DATA_DIR; }

inline std::string data_path(const std::string& rel) {
  return (std::filesystem::path(INEQFORGE_DATA_DIR) / rel).string();
}

inline ineqforge::Corpus load_seeds() {
  return ineqforge::load_corpus(data_path("seeds75.jsonl"));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("cannot open " + path).c_str());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

/// Scratch directory removed at scope exit.
class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/ineqforge-test-XXXXXX";
    dir_ = mkdtemp(tmpl);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& rel = "") const {
    return rel.empty() ? dir_ : (std::filesystem::path(dir_) / rel).string();
  }

 private:
  std::string dir_;
};

// Small expression shorthands used across the tests.
inline ineqforge::ExprPtr V(const std::string& base, unsigned idx = 0) {
  return ineqforge::var(base, idx);
}
inline ineqforge::ExprPtr C(std::int64_t n, std::int64_t d = 1) {
  return ineqforge::constant(n, d);
}

inline ineqforge::Problem make_problem(
    const std::string& id, std::vector<ineqforge::VarId> vars,
    std::vector<ineqforge::Condition> conds, ineqforge::ExprPtr lhs,
    ineqforge::ExprPtr rhs, bool rhs_positive,
    ineqforge::Category category = ineqforge::Category::Generated) {
  ineqforge::Problem p;
  p.id = id;
  p.category = category;
  p.variables = std::move(vars);
  p.conditions = std::move(conds);
  p.lhs = std::move(lhs);
  p.rhs = std::move(rhs);
  p.rhs_positive = rhs_positive;
  ineqforge::validate_problem(p);
  return p;
}

}  // namespace testutil
