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
#include <vector>

#include "byzgrad/types.hpp"

namespace byzgrad::core {

/// Squared-error cost (1/2)||y - x w||^2 of one agent at estimate w.
double cost(const AgentData& agent, const Vector& w);

/// Exact gradient x^T (x w - y) of the agent's cost at w.
Vector gradient(const AgentData& agent, const Vector& w);

/// Gradients of every agent at a common estimate. OpenMP-parallel over
/// agents; bitwise identical to gradients_serial for any thread count
/// (each slot is written independently, no cross-agent reduction).
std::vector<Vector> gradients(std::span<const AgentData> agents,
                              const Vector& w);

/// Serial reference for `gradients`, kept for tests and benchmarks.
std::vector<Vector> gradients_serial(std::span<const AgentData> agents,
                                     const Vector& w);

/// Builds a Problem whose responses satisfy y_i = x_i w_star + xi_i with
/// ||xi_i|| <= noise.bound (exactly zero noise for Kind::None).
/// Deterministic for a fixed noise seed.
Problem synthesize_problem(std::vector<Matrix> x_blocks, const Vector& w_star,
                           const NoiseModel& noise, int f, ConstraintBox box);

}  // namespace byzgrad::core
