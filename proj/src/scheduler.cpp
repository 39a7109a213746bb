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

#include "byzgrad/scheduler.hpp"

#include <sstream>

#include "byzgrad/core.hpp"

namespace byzgrad::scheduler {

void validate(const DelayModel& model, int n_agents) {
  if (model.t_o < 0) throw InvalidInput("t_o must be >= 0");
  if (model.pattern == DelayPattern::Synchronous && model.t_o != 0) {
    throw InvalidInput("synchronous pattern requires t_o = 0");
  }
  if (model.pattern == DelayPattern::RandomBounded &&
      (model.deliver_prob < 0.0 || model.deliver_prob > 1.0)) {
    throw InvalidInput("deliver_prob must lie in [0, 1]");
  }
  if (model.pattern == DelayPattern::FixedPeriodic) {
    if (model.periods.size() != 1 &&
        model.periods.size() != static_cast<std::size_t>(n_agents)) {
      std::ostringstream msg;
      msg << "periods must have 1 or " << n_agents << " entries, got "
          << model.periods.size();
      throw InvalidInput(msg.str());
    }
    for (int p : model.periods) {
      if (p < 1) throw InvalidInput("periods must be >= 1");
      if (p - 1 > model.t_o) {
        std::ostringstream msg;
        msg << "period " << p << " would exceed the staleness bound t_o = "
            << model.t_o;
        throw InvalidInput(msg.str());
      }
    }
  }
  if (model.outdatedness_limit && *model.outdatedness_limit < 0) {
    throw InvalidInput("outdatedness_limit must be >= 0");
  }
}

EstimateHistory::EstimateHistory(int capacity)
    : capacity_(capacity), ring_(static_cast<std::size_t>(capacity)) {
  if (capacity < 1) throw InvalidInput("history capacity must be >= 1");
}

void EstimateHistory::push(int t, Vector w) {
  if (t != latest_ + 1) {
    throw InvalidInput("history must be filled one iteration at a time");
  }
  ring_[static_cast<std::size_t>(t % capacity_)] = std::move(w);
  latest_ = t;
}

const Vector& EstimateHistory::at(int t) const {
  if (t < 0 || t > latest_ || t <= latest_ - capacity_) {
    std::ostringstream msg;
    msg << "estimate for iteration " << t << " is not retained (latest "
        << latest_ << ", capacity " << capacity_ << ")";
    throw InvalidInput(msg.str());
  }
  return ring_[static_cast<std::size_t>(t % capacity_)];
}

StalenessProcess::StalenessProcess(const DelayModel& model, int n_agents)
    : model_(model), current_(static_cast<std::size_t>(n_agents), 0) {
  validate(model, n_agents);
  engines_.reserve(static_cast<std::size_t>(n_agents));
  for (int i = 0; i < n_agents; ++i) {
    engines_.emplace_back(rng::derive_seed(model.seed, rng::Stream::Delays,
                                           static_cast<std::uint64_t>(i)));
  }
}

void StalenessProcess::advance(int t) {
  if (t != last_t_ + 1) {
    throw InvalidInput("staleness process must advance one tick at a time");
  }
  last_t_ = t;
  const int n = static_cast<int>(current_.size());
  for (int i = 0; i < n; ++i) {
    int s = 0;
    switch (model_.pattern) {
      case DelayPattern::Synchronous:
        s = 0;
        break;
      case DelayPattern::RandomBounded: {
        // Staleness accrues until it would exceed t_o, at which point
        // delivery is forced. At t = 0 "one tick stale" means no report
        // has arrived yet (t - s < 0).
        const int accrued = (t == 0 ? 1 : current_[static_cast<std::size_t>(i)] + 1);
        if (accrued > model_.t_o) {
          s = 0;
        } else {
          std::uniform_real_distribution<double> u(0.0, 1.0);
          s = (u(engines_[static_cast<std::size_t>(i)]) < model_.deliver_prob)
                  ? 0
                  : accrued;
        }
        break;
      }
      case DelayPattern::FixedPeriodic: {
        const int period =
            model_.periods.size() == 1
                ? model_.periods[0]
                : model_.periods[static_cast<std::size_t>(i)];
        s = t % period;
        break;
      }
    }
    current_[static_cast<std::size_t>(i)] = s;
  }
  trace_.push_back(current_);
}

GradientReport effective_report(const AgentData& agent, int t, int staleness,
                                const EstimateHistory& history) {
  const int issued_at = t - staleness;
  GradientReport report;
  report.agent_id = agent.id;
  report.issued_at = issued_at;
  if (issued_at < 0) {
    report.g = Vector::Zero(agent.dim());
  } else {
    report.g = core::gradient(agent, history.at(issued_at));
  }
  return report;
}

}  // namespace byzgrad::scheduler
