// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "ineqforge/problem.hpp"
#include "ineqforge/rng.hpp"

namespace ineqforge {

struct OracleViolation {
  Env env;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // lhs - rhs, negative for statement violations
};

struct SampleReport {
  std::string problem_id;
  std::size_t attempted = 0;  // raw draws tried
  std::size_t accepted = 0;   // feasible envs actually checked
  std::size_t violation_count = 0;
  std::size_t tag_violation_count = 0;
  std::size_t domain_faults = 0;
  bool feasibility_exhausted = false;
  std::vector<OracleViolation> violations;      // detail capped
  std::vector<OracleViolation> tag_violations;  // detail capped

  bool ok() const {
    return violation_count == 0 && tag_violation_count == 0 &&
           !feasibility_exhausted;
  }
};

struct FeasibleSamples {
  std::vector<Env> envs;
  std::size_t attempted = 0;
  bool exhausted = false;
};

/// Draws positive assignments satisfying every condition to within 1e-12
/// absolute. Homogeneous equality conditions (plain and weighted sums,
/// products, and their images under the variable substitutions) are solved
/// by power scaling of a positive random draw; other equalities by monotone
/// bisection on a pivot variable; inequality conditions by rejection from
/// log-uniform draws over [1e-3, 1e3]. Runs out of budget after 10*n draws
/// with nothing accepted and reports instead of throwing.
FeasibleSamples sample_feasible(const Problem& p, Rng& rng, std::size_t n);

/// Samples the feasible region and records every env where lhs falls below
/// rhs beyond the relative-plus-absolute tolerance, every env where the
/// positive-RHS tag is contradicted, and domain faults (excluded from the
/// violation denominator).
SampleReport check_problem(const Problem& p, Rng& rng, std::size_t n,
                           double rel_tol = 1e-9);

}  // namespace ineqforge
