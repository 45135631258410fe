// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace ineqforge {

struct ProcessResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
  bool timed_out = false;
  double wall_time_s = 0.0;
};

/// Runs argv with stdin_data on standard input, capturing combined output.
/// On timeout the process group is killed and timed_out is set.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdin_data, double timeout_s);

/// Whitespace-splits a command line ("lake env lean" -> 3 argv entries).
std::vector<std::string> split_command(const std::string& command);

}  // namespace ineqforge
