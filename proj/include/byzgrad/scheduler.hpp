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
#include <random>
#include <vector>

#include "byzgrad/types.hpp"

namespace byzgrad::scheduler {

enum class DelayPattern { Synchronous, RandomBounded, FixedPeriodic };

/// Bounded-staleness model for honest agents. Every generated staleness
/// sequence satisfies 0 <= s_i(t) <= t_o and s_i(t+1) <= 1 + s_i(t);
/// t_o = 0 is full synchronism. Byzantine agents ignore the delay model.
struct DelayModel {
  int t_o = 0;
  DelayPattern pattern = DelayPattern::Synchronous;
  double deliver_prob = 0.7;    // RandomBounded: chance of a fresh report
  std::vector<int> periods;     // FixedPeriodic: one entry per agent
  std::optional<int> outdatedness_limit;  // crash-detection cutoff
  std::uint64_t seed = 0;
};

/// Throws InvalidInput on malformed models (negative t_o, probability
/// outside [0,1], periods incompatible with t_o).
void validate(const DelayModel& model, int n_agents);

/// Ring buffer holding the most recent estimates; the staleness bound
/// means nothing older than t_o + 1 entries is ever read.
class EstimateHistory {
 public:
  explicit EstimateHistory(int capacity);

  void push(int t, Vector w);
  const Vector& at(int t) const;
  int latest() const { return latest_; }

 private:
  int capacity_;
  int latest_ = -1;
  std::vector<Vector> ring_;
};

/// Generates s_i(t) per honest agent, one tick at a time. Each agent draws
/// from its own seeded stream, so sequences do not depend on how many
/// other agents exist or which of them are Byzantine.
class StalenessProcess {
 public:
  StalenessProcess(const DelayModel& model, int n_agents);

  /// Must be called with t = 0, 1, 2, ... exactly once per tick.
  void advance(int t);

  int staleness(int agent) const { return current_.at(agent); }

  /// trace()[t][i] = s_i(t); recorded for invariant checks.
  const std::vector<std::vector<int>>& trace() const { return trace_; }

 private:
  DelayModel model_;
  std::vector<std::mt19937_64> engines_;
  std::vector<int> current_;
  std::vector<std::vector<int>> trace_;
  int last_t_ = -1;
};

/// The report agent `agent` effectively delivers at tick t with staleness
/// s: its gradient at the estimate from iteration t - s, or the zero
/// vector when t - s < 0 (nothing reported yet). issued_at = t - s.
GradientReport effective_report(const AgentData& agent, int t, int staleness,
                                const EstimateHistory& history);

}  // namespace byzgrad::scheduler
