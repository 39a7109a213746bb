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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace byzgrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Input that violates a precondition (dimension mismatch, bad counts,
/// non-finite report, failed config validation).
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric breakdown at runtime (non-finite update direction or estimate).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinatorial work would exceed the configured enumeration guard.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure (missing config, unwritable output).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One agent's share of the regression data: rows of the data matrix and
/// the matching responses. All gradients an honest agent ever reports are
/// derived from this block.
struct AgentData {
  int id = 0;
  Matrix x;  // (n_i, d)
  Vector y;  // (n_i)

  int rows() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// Axis-aligned box the server projects every estimate into.
struct ConstraintBox {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vector& w) const {
    return (w.array() >= lo.array()).all() && (w.array() <= hi.array()).all();
  }
  Vector center() const { return 0.5 * (lo + hi); }
};

/// Response perturbation: either exact responses or per-agent noise vectors
/// with Euclidean norm at most `bound`.
struct NoiseModel {
  enum class Kind { None, BoundedResponse };
  Kind kind = Kind::None;
  double bound = 0.0;
  std::uint64_t seed = 0;
};

/// A full problem instance. `w_star` is carried for adversaries and error
/// metrics only; the server's update path never reads it.
struct Problem {
  std::vector<AgentData> agents;
  int f = 0;
  Vector w_star;
  ConstraintBox box;

  int n() const { return static_cast<int>(agents.size()); }
  int dim() const { return static_cast<int>(w_star.size()); }
};

/// Throws InvalidInput unless the problem satisfies all structural
/// invariants: consistent dimensions, at least one row per agent,
/// 2f < n, and w_star inside the box.
void validate(const Problem& problem);

/// What the server aggregates: one gradient vector per agent per tick,
/// stamped with the iteration of the estimate it was computed at.
struct GradientReport {
  int agent_id = 0;
  Vector g;
  int issued_at = 0;
};

namespace rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Fixed stream tags so every randomized component draws from its own
// deterministic stream derived from the run seed.
enum class Stream : std::uint64_t {
  Noise = 1,
  Adversary = 2,
  Delays = 3,
  ByzantineSelection = 4,
  Synthetic = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ (0x9E3779B97F4A7C15ULL *
                                         static_cast<std::uint64_t>(stream))) +
                    index);
}

}  // namespace rng

}  // namespace byzgrad
