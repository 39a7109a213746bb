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
#include <span>
#include <string>
#include <variant>

#include "byzgrad/types.hpp"

namespace byzgrad::adversaries {

/// Reports a vector pointed away from the true parameter, scaled to the
/// (f+1)-th largest honest norm so it always survives norm filtering.
struct Omniscient {};

/// Reports i.i.d. normal coordinates with standard deviation `sigma`.
struct RandomGradient {
  double sigma = 10.0;
};

/// Behaves honestly until `stop_at`, then stops responding for good.
struct Crash {
  int stop_at = 0;
};

using AdversaryKind = std::variant<Omniscient, RandomGradient, Crash>;

std::string to_string(const AdversaryKind& kind);

/// The report a Byzantine agent sends at tick t, or nullopt when it sends
/// nothing (Crash after stop_at). `self` is the agent's own data block and
/// is required for Crash (it reports its true gradient until it stops).
/// Deterministic for a fixed generator state.
///
/// Omniscient needs at least f+1 honest reports to pick its norm from.
std::optional<Vector> byzantine_report(
    const AdversaryKind& kind, int t, const Vector& w_t, const Vector& w_star,
    std::span<const GradientReport> honest_reports, int f,
    std::mt19937_64& rng, const AgentData* self = nullptr);

/// One Byzantine agent with its own generator stream.
class Adversary {
 public:
  Adversary(AdversaryKind kind, std::uint64_t seed)
      : kind_(std::move(kind)), rng_(seed) {}

  std::optional<Vector> report(int t, const Vector& w_t, const Vector& w_star,
                               std::span<const GradientReport> honest_reports,
                               int f, const AgentData* self = nullptr) {
    return byzantine_report(kind_, t, w_t, w_star, honest_reports, f, rng_,
                            self);
  }

  const AdversaryKind& kind() const { return kind_; }

 private:
  AdversaryKind kind_;
  std::mt19937_64 rng_;
};

}  // namespace byzgrad::adversaries
