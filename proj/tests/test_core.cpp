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

#include <array>
#include <random>

#include <doctest.h>

#include "byzgrad/core.hpp"
#include "oracles.hpp"

using namespace byzgrad;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("cost: hand-computed values on the fan instance") {
  const Problem problem = oracle::fan_problem();
  const AgentData& first = problem.agents[0];  // x = (1, 0), y = 1

  CHECK(core::cost(first, vec2(1.0, 1.0)) == doctest::Approx(0.0));
  CHECK(core::cost(first, vec2(0.0, 0.0)) == doctest::Approx(0.5));
  for (const AgentData& agent : problem.agents) {
    CHECK(core::cost(agent, problem.w_star) == doctest::Approx(0.0));
    CHECK(core::cost(agent, vec2(-3.0, 7.0)) >= 0.0);
  }
}

TEST_CASE("gradient: hand-computed values and vanishing at w_star") {
  const Problem problem = oracle::fan_problem();
  const AgentData& first = problem.agents[0];

  const Vector at_truth = core::gradient(first, vec2(1.0, 1.0));
  CHECK(at_truth.norm() == doctest::Approx(0.0));

  const Vector at_origin = core::gradient(first, vec2(0.0, 0.0));
  CHECK(at_origin[0] == doctest::Approx(-1.0));
  CHECK(at_origin[1] == doctest::Approx(0.0));

  for (const AgentData& agent : problem.agents) {
    CHECK(core::gradient(agent, problem.w_star).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("gradient: dimension mismatch is rejected") {
  const Problem problem = oracle::fan_problem();
  Vector w3(3);
  w3 << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(core::gradient(problem.agents[0], w3), InvalidInput);
  CHECK_THROWS_AS(core::cost(problem.agents[0], w3), InvalidInput);
}

TEST_CASE("gradient agrees with central finite differences") {
  const Problem problem = oracle::fan_problem();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Vector w = vec2(coord(rng), coord(rng));
    for (const AgentData& agent : problem.agents) {
      const Vector analytic = core::gradient(agent, w);
      const Vector numeric = oracle::finite_difference_gradient(agent, w);
      worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("gradient is affine in w") {
  const Problem problem = oracle::fan_problem();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector w = vec2(coord(rng), coord(rng));
    const double a = scale(rng);
    for (const AgentData& agent : problem.agents) {
      const Vector lhs = core::gradient(agent, a * w);
      const Vector rhs = a * core::gradient(agent, w) +
                         (1.0 - a) * core::gradient(agent, Vector::Zero(2));
      CHECK((lhs - rhs).norm() == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("cost is convex along random segments") {
  const Problem problem = oracle::fan_problem();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector u = vec2(coord(rng), coord(rng));
    const Vector v = vec2(coord(rng), coord(rng));
    for (const AgentData& agent : problem.agents) {
      const double mid = core::cost(agent, 0.5 * (u + v));
      const double avg = 0.5 * (core::cost(agent, u) + core::cost(agent, v));
      CHECK(mid <= avg + 1e-9 * std::max(1.0, avg));
    }
  }
}

TEST_CASE("synthesize_problem: exact responses on the fan instance") {
  const Problem problem = oracle::fan_problem();
  const std::array<double, 6> expected{1.0, 1.3, 1.3, 1.0, 0.3, -0.3};
  for (int i = 0; i < 6; ++i) {
    REQUIRE(problem.agents[static_cast<std::size_t>(i)].y.size() == 1);
    CHECK(problem.agents[static_cast<std::size_t>(i)].y[0] ==
          doctest::Approx(expected[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("synthesize_problem: zero parameter gives zero responses") {
  ConstraintBox box;
  box.lo = Vector::Constant(2, -1.0);
  box.hi = Vector::Constant(2, 1.0);
  const Problem problem = core::synthesize_problem(
      oracle::fan_blocks(), Vector::Zero(2), NoiseModel{}, 0, box);
  for (const AgentData& agent : problem.agents) {
    CHECK(agent.y.norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("synthesize_problem: bounded noise respects the bound exactly") {
  ConstraintBox box;
  box.lo = Vector::Constant(2, -100.0);
  box.hi = Vector::Constant(2, 100.0);
  Vector w_star(2);
  w_star << 1.0, 1.0;
  NoiseModel noise;
  noise.kind = NoiseModel::Kind::BoundedResponse;
  noise.bound = 0.1;

  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    noise.seed = seed;
    const Problem problem =
        core::synthesize_problem(oracle::fan_blocks(), w_star, noise, 1, box);
    const Problem clean = oracle::fan_problem();
    for (int i = 0; i < 6; ++i) {
      const Vector xi = problem.agents[static_cast<std::size_t>(i)].y -
                        clean.agents[static_cast<std::size_t>(i)].y;
      CHECK(xi.norm() <= 0.1);
    }
  }

  // Same seed, same noise.
  noise.seed = 3;
  const Problem a =
      core::synthesize_problem(oracle::fan_blocks(), w_star, noise, 1, box);
  const Problem b =
      core::synthesize_problem(oracle::fan_blocks(), w_star, noise, 1, box);
  for (int i = 0; i < 6; ++i) {
    CHECK(oracle::same_bits(a.agents[static_cast<std::size_t>(i)].y,
                             b.agents[static_cast<std::size_t>(i)].y));
  }
}

TEST_CASE("synthesize_problem: structural validation") {
  ConstraintBox box;
  box.lo = Vector::Constant(2, -100.0);
  box.hi = Vector::Constant(2, 100.0);
  Vector w_star(2);
  w_star << 1.0, 1.0;

  SUBCASE("A3: 2f >= n is rejected") {
    CHECK_THROWS_AS(core::synthesize_problem(oracle::fan_blocks(), w_star,
                                             NoiseModel{}, 3, box),
                    InvalidInput);
  }
  SUBCASE("mismatched block width is rejected") {
    std::vector<Matrix> blocks = oracle::fan_blocks();
    blocks.push_back(Matrix::Ones(1, 3));
    CHECK_THROWS_AS(
        core::synthesize_problem(blocks, w_star, NoiseModel{}, 1, box),
        InvalidInput);
  }
  SUBCASE("w_star outside the box is rejected") {
    Vector outside(2);
    outside << 500.0, 0.0;
    CHECK_THROWS_AS(core::synthesize_problem(oracle::fan_blocks(), outside,
                                             NoiseModel{}, 1, box),
                    InvalidInput);
  }
}

TEST_CASE("parallel gradient evaluation matches the serial reference") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> entry(0.0, 1.0);
  std::vector<AgentData> agents;
  for (int i = 0; i < 17; ++i) {
    AgentData a;
    a.id = i;
    a.x = Matrix(3, 4);
    a.y = Vector(3);
    for (int r = 0; r < 3; ++r) {
      a.y[r] = entry(rng);
      for (int c = 0; c < 4; ++c) a.x(r, c) = entry(rng);
    }
    agents.push_back(std::move(a));
  }
  Vector w(4);
  w << 0.3, -1.2, 2.0, 0.7;

  const auto parallel = core::gradients(agents, w);
  const auto serial = core::gradients_serial(agents, w);
  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < parallel.size(); ++i) {
    CHECK(oracle::same_bits(parallel[i], serial[i]));
  }
}
