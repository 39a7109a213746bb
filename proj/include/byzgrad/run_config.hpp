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

#include <optional>
#include <string>
#include <vector>

#include "byzgrad/adversaries.hpp"
#include "byzgrad/filters.hpp"
#include "byzgrad/scheduler.hpp"
#include "byzgrad/server.hpp"
#include "byzgrad/types.hpp"

namespace byzgrad {

/// Random dense data blocks: n_agents blocks of shape (rows_per_agent, d)
/// with i.i.d. normal entries scaled by `scale`. w_star defaults to a
/// seeded uniform draw from [-1, 1]^d.
struct SyntheticSpec {
  int n_agents = 0;
  int rows_per_agent = 1;
  int d = 0;
  double scale = 1.0;
  std::optional<Vector> w_star;
};

/// Either inline data blocks or a synthetic generator.
struct ProblemSpec {
  std::vector<Matrix> x_blocks;
  std::optional<Vector> w_star;
  std::optional<SyntheticSpec> synthetic;
  ConstraintBox box;
  NoiseModel noise;
};

/// Full experiment description. `validate_config` (config.cpp) enforces
/// the structural invariants before a run starts.
struct RunConfig {
  ProblemSpec problem;
  int f = 0;
  std::vector<int> byzantine_ids;
  std::optional<int> random_byzantine_count;
  adversaries::AdversaryKind adversary = adversaries::RandomGradient{};
  filters::FilterKind filter = filters::FilterKind::NormFilter;
  server::StepSchedule schedule;
  scheduler::DelayModel delays;
  std::optional<Vector> w0;  // default: box center
  int horizon = 50;
  std::uint64_t seed = 0;
  std::string out_path;
};

/// Materializes the problem instance (inline or synthetic, responses
/// with noise applied) deterministically from the config seed.
Problem build_problem(const RunConfig& config);

/// The resolved Byzantine id set: explicit list, or a seeded draw of
/// random_byzantine_count distinct ids.
std::vector<int> resolve_byzantine_ids(const RunConfig& config, int n_agents);

}  // namespace byzgrad
