// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace ineqforge::cli {

/// Exit codes: 0 success, 1 domain failure (violations, exhaustion, bad
/// input data), 2 usage or configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line given argv without the program name.
int run(const std::vector<std::string>& args);

}  // namespace ineqforge::cli
