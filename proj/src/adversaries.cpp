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

#include "byzgrad/adversaries.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "byzgrad/core.hpp"

namespace byzgrad::adversaries {

std::string to_string(const AdversaryKind& kind) {
  if (std::holds_alternative<Omniscient>(kind)) return "omniscient";
  if (std::holds_alternative<RandomGradient>(kind)) return "random_gradient";
  return "crash";
}

namespace {

// The (f+1)-th largest honest report norm: the largest value that is
// still guaranteed to survive norm filtering when at most f reports
// (the Byzantine ones) can rank above it.
double filter_safe_norm(std::span<const GradientReport> honest_reports,
                        int f) {
  if (static_cast<int>(honest_reports.size()) < f + 1) {
    std::ostringstream msg;
    msg << "omniscient adversary needs at least f+1 = " << (f + 1)
        << " honest reports, got " << honest_reports.size();
    throw InvalidInput(msg.str());
  }
  std::vector<double> norms;
  norms.reserve(honest_reports.size());
  for (const GradientReport& r : honest_reports) norms.push_back(r.g.norm());
  std::sort(norms.begin(), norms.end(), std::greater<>());
  return norms[f];
}

}  // namespace

std::optional<Vector> byzantine_report(
    const AdversaryKind& kind, int t, const Vector& w_t, const Vector& w_star,
    std::span<const GradientReport> honest_reports, int f,
    std::mt19937_64& rng, const AgentData* self) {
  if (const auto* omni = std::get_if<Omniscient>(&kind)) {
    (void)omni;
    const double norm = filter_safe_norm(honest_reports, f);
    Vector towards_truth = w_star - w_t;
    const double distance = towards_truth.norm();
    if (distance == 0.0) return Vector::Zero(w_t.size());
    return towards_truth * (norm / distance);
  }
  if (const auto* random = std::get_if<RandomGradient>(&kind)) {
    std::normal_distribution<double> coordinate(0.0, random->sigma);
    Vector g(w_t.size());
    for (int k = 0; k < g.size(); ++k) g[k] = coordinate(rng);
    return g;
  }
  const auto& crash = std::get<Crash>(kind);
  if (t >= crash.stop_at) return std::nullopt;
  if (self == nullptr) {
    throw InvalidInput("crash adversary needs the agent's own data block");
  }
  return core::gradient(*self, w_t);
}

}  // namespace byzgrad::adversaries
