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

#include <span>
#include <string>
#include <vector>

#include "byzgrad/filters.hpp"
#include "byzgrad/types.hpp"

namespace byzgrad {
struct RunConfig;
}

namespace byzgrad::server {

/// Step-size sequence. Diminishing is eta_t = c / (t + 1) (summable
/// squares, divergent sum, monotone non-increasing); Constant is a fixed
/// eta; TheoremConstant resolves at run start to the constant step that
/// yields a linear rate, and requires the corresponding f/n condition.
struct StepSchedule {
  enum class Kind { Diminishing, Constant, TheoremConstant };
  Kind kind = Kind::Diminishing;
  double value = 1.0;  // c for Diminishing, eta for Constant
};

/// eta_t for a resolved schedule (TheoremConstant must be resolved to
/// Constant before stepping).
double step_size(const StepSchedule& schedule, int t);

struct TracePoint {
  int t = 0;
  Vector w;
  double error = 0.0;           // ||w^t - w_star||
  double direction_norm = 0.0;  // norm of the aggregated update direction
  std::vector<int> filter_set;  // ids kept by the filter, ascending
  std::vector<int> capped_ids;  // ids rescaled by NormCapFilter, ascending
};

struct Trace {
  std::vector<TracePoint> points;
  bool diverged = false;
  std::string abort_reason;
};

/// Euclidean projection onto an axis-aligned box: coordinate-wise clamp.
/// Idempotent and non-expansive.
Vector project_box(const Vector& w, const ConstraintBox& box);

/// One projected descent step: project_box(w - eta * direction).
/// Throws NumericError when the direction is non-finite.
Vector step(const Vector& w, const Vector& direction, double eta,
            const ConstraintBox& box);

/// The whole experiment: per tick, gather honest reports through the
/// delay model, Byzantine reports from the adversary, aggregate through
/// the filter, step, project, record. Fully deterministic given the
/// config seed. On numeric blow-up the partial trace is returned with
/// `diverged` set instead of throwing.
Trace run(const RunConfig& config);

}  // namespace byzgrad::server
