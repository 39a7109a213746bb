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

#include "byzgrad/core.hpp"

#include <random>
#include <sstream>
#include <utility>

namespace byzgrad {

void validate(const Problem& problem) {
  const int n = problem.n();
  if (n < 1) throw InvalidInput("problem has no agents");
  const int d = problem.dim();
  if (d < 1) throw InvalidInput("w_star is empty");
  for (const AgentData& a : problem.agents) {
    if (a.rows() < 1) {
      std::ostringstream msg;
      msg << "agent " << a.id << " has no data rows";
      throw InvalidInput(msg.str());
    }
    if (a.dim() != d || a.y.size() != a.x.rows()) {
      std::ostringstream msg;
      msg << "agent " << a.id << " has inconsistent dimensions: x is "
          << a.x.rows() << "x" << a.x.cols() << ", y has " << a.y.size()
          << " entries, d = " << d;
      throw InvalidInput(msg.str());
    }
  }
  if (problem.f < 0) throw InvalidInput("f must be non-negative");
  if (2 * problem.f >= n) {
    std::ostringstream msg;
    msg << "A3 violated: 2f >= n (f = " << problem.f << ", n = " << n << ")";
    throw InvalidInput(msg.str());
  }
  if (problem.box.dim() != d || problem.box.hi.size() != d) {
    throw InvalidInput("box dimension does not match d");
  }
  for (int k = 0; k < d; ++k) {
    if (!(problem.box.lo[k] <= problem.box.hi[k])) {
      throw InvalidInput("box is empty: lo > hi in some coordinate");
    }
    if (!std::isfinite(problem.box.lo[k]) || !std::isfinite(problem.box.hi[k])) {
      throw InvalidInput("box must be bounded (finite lo/hi)");
    }
  }
  if (!problem.box.contains(problem.w_star)) {
    throw InvalidInput("w_star lies outside the constraint box");
  }
}

namespace core {

namespace {

void check_dim(const AgentData& agent, const Vector& w) {
  if (w.size() != agent.dim()) {
    std::ostringstream msg;
    msg << "estimate has " << w.size() << " entries but agent " << agent.id
        << " data has d = " << agent.dim();
    throw InvalidInput(msg.str());
  }
}

// Noise vector of length len with norm drawn uniformly from [0, bound]:
// a standard-normal direction rescaled to the drawn radius.
Vector bounded_noise(int len, double bound, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector direction(len);
  for (int k = 0; k < len; ++k) direction[k] = normal(rng);
  double norm = direction.norm();
  if (norm == 0.0) {
    direction.setZero();
    direction[0] = 1.0;
    norm = 1.0;
  }
  std::uniform_real_distribution<double> radius(0.0, bound);
  return direction * (radius(rng) / norm);
}

}  // namespace

double cost(const AgentData& agent, const Vector& w) {
  check_dim(agent, w);
  return 0.5 * (agent.y - agent.x * w).squaredNorm();
}

Vector gradient(const AgentData& agent, const Vector& w) {
  check_dim(agent, w);
  return agent.x.transpose() * (agent.x * w - agent.y);
}

std::vector<Vector> gradients(std::span<const AgentData> agents,
                              const Vector& w) {
  std::vector<Vector> out(agents.size());
  const std::int64_t n = static_cast<std::int64_t>(agents.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = gradient(agents[i], w);
  }
  return out;
}

std::vector<Vector> gradients_serial(std::span<const AgentData> agents,
                                     const Vector& w) {
  std::vector<Vector> out;
  out.reserve(agents.size());
  for (const AgentData& a : agents) out.push_back(gradient(a, w));
  return out;
}

Problem synthesize_problem(std::vector<Matrix> x_blocks, const Vector& w_star,
                           const NoiseModel& noise, int f, ConstraintBox box) {
  if (noise.bound < 0.0) throw InvalidInput("noise bound must be >= 0");
  for (std::size_t i = 0; i < x_blocks.size(); ++i) {
    if (x_blocks[i].cols() != w_star.size()) {
      std::ostringstream msg;
      msg << "data block " << i << " has " << x_blocks[i].cols()
          << " columns but w_star has " << w_star.size() << " entries";
      throw InvalidInput(msg.str());
    }
  }

  Problem problem;
  problem.f = f;
  problem.w_star = w_star;
  problem.box = std::move(box);
  problem.agents.reserve(x_blocks.size());

  std::mt19937_64 rng(noise.seed);
  int id = 0;
  for (Matrix& x : x_blocks) {
    AgentData agent;
    agent.id = id++;
    agent.y = x * w_star;
    if (noise.kind == NoiseModel::Kind::BoundedResponse && noise.bound > 0.0) {
      agent.y += bounded_noise(static_cast<int>(x.rows()), noise.bound, rng);
    }
    agent.x = std::move(x);
    problem.agents.push_back(std::move(agent));
  }
  validate(problem);
  return problem;
}

}  // namespace core
}  // namespace byzgrad
