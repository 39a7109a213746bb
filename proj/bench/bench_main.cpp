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

// Compares the OpenMP kernels against their serial references on inputs
// large enough to matter: the subset minimum-eigenvalue enumeration and
// the multi-agent gradient evaluation.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "byzgrad/analysis.hpp"
#include "byzgrad/core.hpp"

using namespace byzgrad;

namespace {

double milliseconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<AgentData> random_agents(int n, int rows, int d,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> entry(0.0, 1.0);
  std::vector<AgentData> agents;
  agents.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    AgentData a;
    a.id = i;
    a.x = Matrix(rows, d);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < d; ++c) a.x(r, c) = entry(rng);
    }
    a.y = Vector::Zero(rows);
    agents.push_back(std::move(a));
  }
  return agents;
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());

  {
    // Subset enumeration: n = 20, k = 12 visits C(20, 12) = 125970
    // subsets, each with a d x d eigensolve.
    const int n = 20, d = 8, k = 12;
    const std::vector<AgentData> agents = random_agents(n, 3, d, 7);
    std::vector<Matrix> grams;
    for (const AgentData& a : agents) grams.push_back(a.x.transpose() * a.x);

    auto start = std::chrono::steady_clock::now();
    const double serial =
        analysis::detail::min_subset_gram_eigen_serial(grams, k, 200000);
    const double serial_ms = milliseconds_since(start);

    start = std::chrono::steady_clock::now();
    const double parallel =
        analysis::detail::min_subset_gram_eigen(grams, k, 200000);
    const double parallel_ms = milliseconds_since(start);

    std::printf("subset min-eigen (n=%d, k=%d, d=%d)\n", n, k, d);
    std::printf("  serial   %10.2f ms   result %.12g\n", serial_ms, serial);
    std::printf("  parallel %10.2f ms   result %.12g\n", parallel_ms, parallel);
    std::printf("  speedup  %10.2fx   match %s\n\n", serial_ms / parallel_ms,
                serial == parallel ? "exact" : "MISMATCH");
  }

  {
    // Gradient evaluation across agents with fat data blocks.
    const int n = 64, rows = 4000, d = 32, repeats = 20;
    const std::vector<AgentData> agents = random_agents(n, rows, d, 11);
    const Vector w = Vector::Ones(d);

    auto start = std::chrono::steady_clock::now();
    double checksum_serial = 0.0;
    for (int r = 0; r < repeats; ++r) {
      for (const Vector& g : core::gradients_serial(agents, w)) {
        checksum_serial += g.sum();
      }
    }
    const double serial_ms = milliseconds_since(start);

    start = std::chrono::steady_clock::now();
    double checksum_parallel = 0.0;
    for (int r = 0; r < repeats; ++r) {
      for (const Vector& g : core::gradients(agents, w)) {
        checksum_parallel += g.sum();
      }
    }
    const double parallel_ms = milliseconds_since(start);

    std::printf("gradient evaluation (n=%d, rows=%d, d=%d, %d repeats)\n", n,
                rows, d, repeats);
    std::printf("  serial   %10.2f ms\n", serial_ms);
    std::printf("  parallel %10.2f ms\n", parallel_ms);
    std::printf("  speedup  %10.2fx   match %s\n", serial_ms / parallel_ms,
                checksum_serial == checksum_parallel ? "exact" : "MISMATCH");
  }
  return 0;
}
