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

#include "byzgrad/server.hpp"

#include <exception>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "byzgrad/adversaries.hpp"
#include "byzgrad/analysis.hpp"
#include "byzgrad/run_config.hpp"
#include "byzgrad/scheduler.hpp"

namespace byzgrad::server {

namespace {

constexpr double kDivergenceNorm = 1e12;
constexpr int kNeverReported = std::numeric_limits<int>::min();

}  // namespace

double step_size(const StepSchedule& schedule, int t) {
  switch (schedule.kind) {
    case StepSchedule::Kind::Diminishing:
      return schedule.value / static_cast<double>(t + 1);
    case StepSchedule::Kind::Constant:
      return schedule.value;
    case StepSchedule::Kind::TheoremConstant:
      throw InvalidInput("TheoremConstant schedule must be resolved before "
                         "stepping");
  }
  throw InvalidInput("unknown schedule kind");
}

Vector project_box(const Vector& w, const ConstraintBox& box) {
  if (w.size() != box.dim()) {
    throw InvalidInput("estimate dimension does not match the box");
  }
  return w.cwiseMax(box.lo).cwiseMin(box.hi);
}

Vector step(const Vector& w, const Vector& direction, double eta,
            const ConstraintBox& box) {
  if (!(eta > 0.0)) throw InvalidInput("step size must be positive");
  if (!direction.allFinite()) {
    throw NumericError("update direction is non-finite");
  }
  return project_box(w - eta * direction, box);
}

Trace run(const RunConfig& config) {
  Problem problem = build_problem(config);
  const int n = problem.n();
  const int d = problem.dim();
  const int f = problem.f;

  const std::vector<int> byz_ids = resolve_byzantine_ids(config, n);
  std::vector<bool> is_byzantine(static_cast<std::size_t>(n), false);
  for (int id : byz_ids) is_byzantine[static_cast<std::size_t>(id)] = true;

  // Resolve the linear-rate constant step from the instance constants.
  StepSchedule schedule = config.schedule;
  if (schedule.kind == StepSchedule::Kind::TheoremConstant) {
    const double mu = analysis::compute_mu(problem.agents);
    const double gamma = analysis::compute_gamma(problem.agents, f);
    schedule.kind = StepSchedule::Kind::Constant;
    schedule.value = analysis::constant_step_and_rate(n, f, mu, gamma).first;
  }

  Vector w = config.w0 ? *config.w0 : problem.box.center();
  if (w.size() != d) throw InvalidInput("w0 dimension does not match d");
  if (!problem.box.contains(w)) {
    throw InvalidInput("w0 lies outside the constraint box");
  }

  scheduler::DelayModel delays = config.delays;
  delays.seed = config.seed;
  scheduler::StalenessProcess staleness(delays, n);
  scheduler::EstimateHistory history(delays.t_o + 1);
  history.push(0, w);

  std::map<int, adversaries::Adversary> adversary_for;
  for (int id : byz_ids) {
    adversary_for.emplace(
        id, adversaries::Adversary(
                config.adversary,
                rng::derive_seed(config.seed, rng::Stream::Adversary,
                                 static_cast<std::uint64_t>(id))));
  }

  // Last report each agent ever delivered, for the outdatedness cutoff
  // and for reusing a crashed agent's final report.
  std::vector<Vector> last_report(static_cast<std::size_t>(n),
                                  Vector::Zero(d));
  std::vector<int> last_issued(static_cast<std::size_t>(n), kNeverReported);
  std::vector<bool> crashed(static_cast<std::size_t>(n), false);

  Trace trace;
  trace.points.reserve(static_cast<std::size_t>(config.horizon) + 1);

  for (int t = 0; t <= config.horizon; ++t) {
    staleness.advance(t);

    // Honest reports, evaluated in parallel (one independent slot per
    // agent, so the result does not depend on the thread count).
    std::vector<GradientReport> honest_reports(static_cast<std::size_t>(n));
    std::vector<char> has_honest(static_cast<std::size_t>(n), 0);
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (int id = 0; id < n; ++id) {
      if (is_byzantine[static_cast<std::size_t>(id)] ||
          crashed[static_cast<std::size_t>(id)]) {
        continue;
      }
      try {
        honest_reports[static_cast<std::size_t>(id)] = scheduler::effective_report(
            problem.agents[static_cast<std::size_t>(id)], t,
            staleness.staleness(id), history);
        has_honest[static_cast<std::size_t>(id)] = 1;
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<GradientReport> honest_list;
    honest_list.reserve(static_cast<std::size_t>(n));
    for (int id = 0; id < n; ++id) {
      if (has_honest[static_cast<std::size_t>(id)]) {
        const GradientReport& r = honest_reports[static_cast<std::size_t>(id)];
        honest_list.push_back(r);
        last_report[static_cast<std::size_t>(id)] = r.g;
        last_issued[static_cast<std::size_t>(id)] = r.issued_at;
      }
    }

    bool aborted = false;
    try {
      // Byzantine reports; a silent agent keeps its previous report on
      // file (or the zero report if it never spoke).
      for (int id : byz_ids) {
        if (crashed[static_cast<std::size_t>(id)]) continue;
        auto& adversary = adversary_for.at(id);
        const auto report =
            adversary.report(t, w, problem.w_star, honest_list, f,
                             &problem.agents[static_cast<std::size_t>(id)]);
        if (report) {
          last_report[static_cast<std::size_t>(id)] = *report;
          last_issued[static_cast<std::size_t>(id)] = t;
        }
      }

      // Outdatedness cutoff: an agent whose report on file is too old is
      // deemed crashed and permanently dropped from aggregation.
      if (delays.outdatedness_limit) {
        for (int id = 0; id < n; ++id) {
          if (crashed[static_cast<std::size_t>(id)]) continue;
          const int issued = last_issued[static_cast<std::size_t>(id)];
          const long long age =
              issued == kNeverReported
                  ? static_cast<long long>(t) + 1
                  : static_cast<long long>(t) - issued;
          if (age > *delays.outdatedness_limit) {
            crashed[static_cast<std::size_t>(id)] = true;
          }
        }
      }

      std::vector<GradientReport> reports;
      reports.reserve(static_cast<std::size_t>(n));
      for (int id = 0; id < n; ++id) {
        if (crashed[static_cast<std::size_t>(id)]) continue;
        GradientReport r;
        r.agent_id = id;
        if (last_issued[static_cast<std::size_t>(id)] == kNeverReported) {
          r.g = Vector::Zero(d);  // nothing received from this agent yet
          r.issued_at = -1;
        } else {
          r.g = last_report[static_cast<std::size_t>(id)];
          r.issued_at = last_issued[static_cast<std::size_t>(id)];
        }
        reports.push_back(std::move(r));
      }

      const filters::Aggregate agg =
          filters::aggregate_detailed(config.filter, reports, f);

      TracePoint point;
      point.t = t;
      point.w = w;
      point.error = (w - problem.w_star).norm();
      point.direction_norm = agg.direction.norm();
      point.filter_set = agg.filter_set;
      point.capped_ids = agg.capped_ids;
      trace.points.push_back(std::move(point));

      if (t < config.horizon) {
        w = step(w, agg.direction, step_size(schedule, t), problem.box);
        if (!w.allFinite() || w.norm() > kDivergenceNorm) {
          throw NumericError("estimate diverged");
        }
        history.push(t + 1, w);
      }
    } catch (const NumericError& e) {
      trace.diverged = true;
      std::ostringstream msg;
      msg << e.what() << " at iteration " << t;
      trace.abort_reason = msg.str();
      aborted = true;
    } catch (const InvalidInput& e) {
      trace.diverged = true;
      std::ostringstream msg;
      msg << "run degraded at iteration " << t << ": " << e.what();
      trace.abort_reason = msg.str();
      aborted = true;
    }
    if (aborted) break;
  }
  return trace;
}

}  // namespace byzgrad::server
