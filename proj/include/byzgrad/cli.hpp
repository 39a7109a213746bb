/*
 * Copyright 2026 The byzgrad Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "byzgrad/analysis.hpp"
#include "byzgrad/run_config.hpp"
#include "byzgrad/server.hpp"

namespace byzgrad::cli {

// Process exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitDivergence = 2;
inline constexpr int kExitIo = 3;

/// Parses and validates a JSON config file. Overrides are `key=value`
/// pairs applied before validation; keys use dotted paths into the JSON
/// document (e.g. `filter=no_filter`, `schedule.c=5`). Parse errors carry
/// line/column context; validation errors name the violated rule.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

/// Config parsed from an in-memory JSON string (used by tests and sweep).
RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides = {});

/// Runs the experiment and writes the trace CSV
/// (`t,error,w_0,...,w_{d-1},direction_norm,filtered_ids`; one row per
/// iteration including t = 0). On divergence the partial trace is written
/// followed by a `# aborted: ...` status line. Returns the exit code.
int cmd_run(const RunConfig& config, const std::string& out_path);

/// Computes the analysis report, prints a human-readable summary to
/// `summary`, and writes the JSON report to out_path. Returns exit code.
int cmd_analyze(const RunConfig& config, const std::string& out_path,
                std::ostream& summary);

/// One axis of a sweep grid: a dotted config key and its values (raw JSON
/// literals or bare strings).
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Run every cell of a 1- or 2-axis grid over the base config; write one
/// CSV row per cell (axis values, final error, converged flag). Failed
/// cells are recorded and the sweep continues. Cells run in parallel.
int cmd_sweep(const std::string& base_config_json,
              const std::vector<SweepAxis>& axes, const std::string& out_path);

/// Trace CSV serialization (also used directly by tests).
void write_trace_csv(const server::Trace& trace, std::ostream& out);

/// Analysis report as JSON text with the fixed field names.
std::string report_to_json(const analysis::AnalysisReport& report);

}  // namespace byzgrad::cli
