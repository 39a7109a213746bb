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

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "byzgrad/types.hpp"

namespace byzgrad::analysis {

/// Hard ceiling on the number of subsets any enumeration is allowed to
/// visit. All constants below are exact minima over agent subsets; the
/// guard keeps that enumeration tractable and can be raised explicitly.
inline constexpr std::size_t kSubsetGuard = 200000;

/// Convergence constants and tolerance thresholds computed from a problem
/// instance.
///
///   mu:      max over agents of the largest eigenvalue of X_i^T X_i
///            (Lipschitz constant of the honest gradients).
///   lambda:  min over size-(n-f) subsets of the smallest stacked-Gram
///            eigenvalue, divided by n-f (strong-convexity modulus).
///   gamma:   same over size-(n-2f) subsets (uniform redundancy modulus).
///   gamma_big: max over the box of ||w - w_star||.
///   thr_t1/thr_t2/thr_a2: f/n tolerance thresholds of the filtered
///            descent variants (diminishing-step norm filter via lambda,
///            norm filter via gamma, norm-cap filter via gamma).
///   eta_star/rho: constant step size and per-step contraction factor of
///            the linear-rate regime (present iff the thr_t2 condition
///            holds with margin n*gamma - f*(2*gamma + mu) > 0).
///   d_star:  guaranteed eventual error radius under bounded response
///            noise (present iff noise is configured and the condition
///            holds).
struct AnalysisReport {
  double mu = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double gamma_big = 0.0;
  double thr_t1 = 0.0;
  double thr_t2 = 0.0;
  double thr_a2 = 0.0;
  double f_over_n = 0.0;
  std::optional<double> eta_star;
  std::optional<double> rho;
  std::optional<double> d_star;
  bool sparse_observable = false;
  Vector su_values;

  bool pass_t1() const { return f_over_n < thr_t1; }
  bool pass_t2() const { return f_over_n < thr_t2; }
  bool pass_a2() const { return f_over_n < thr_a2; }
};

/// (smallest, largest) eigenvalue of a symmetric matrix. Input must be
/// symmetric within 1e-9; a smallest eigenvalue in [-1e-9, 0) is clamped
/// to 0 so PSD inputs never report a spurious negative.
std::pair<double, double> symmetric_eigen_extremes(const Matrix& m);

double compute_mu(std::span<const AgentData> agents);

double compute_lambda(std::span<const AgentData> agents, int f,
                      std::size_t guard = kSubsetGuard);

double compute_gamma(std::span<const AgentData> agents, int f,
                     std::size_t guard = kSubsetGuard);

struct Thresholds {
  double t1 = 0.0;
  double t2 = 0.0;
  double a2 = 0.0;
};

/// The three f/n tolerance bounds. Total: degenerate inputs (non-positive
/// mu, lambda or gamma) yield a 0 threshold instead of an error.
Thresholds thresholds(double mu, double lambda, double gamma);

/// Constant step size eta = (n g - f(2g + m)) / (m^2 (n-f)^2) and the
/// contraction factor rho = sqrt(1 - 2 eta (n g - f(2g+m)) + m^2 (n-f)^2
/// eta^2) < 1. Throws InvalidInput unless n*gamma - f*(2*gamma + mu) > 0.
std::pair<double, double> constant_step_and_rate(int n, int f, double mu,
                                                 double gamma);

/// Eventual error radius under response noise ||xi_i|| <= xi:
/// the per-report perturbation bound is D = max_i sqrt(eig_max(X_i X_i^T))
/// * xi, and the radius is (1/gamma) * (1 - 2f/n) / (1 - (f/n)(2 +
/// mu/gamma)) * D. Throws InvalidInput when the f/n condition fails.
double noise_radius(int n, int f, double mu, double gamma,
                    std::span<const AgentData> agents, double xi);

/// True iff every size-(n-2f) subset's stacked data matrix has full
/// column rank (smallest singular value > 1e-9).
bool sparse_observability(std::span<const AgentData> agents, int f,
                          std::size_t guard = kSubsetGuard);

/// Per basis vector e_k: (1 / (|H| - |B|)) * sum over honest i of
/// ||(I - X_i^T X_i) e_k||_1. A diagnostic for a related trimmed-mean
/// scheme whose assumption requires every entry < 1.
Vector su_assumption_check(std::span<const AgentData> agents,
                           std::span<const int> honest_ids,
                           std::span<const int> byzantine_ids);

/// Full report for a problem plus the run-level inputs the derived
/// quantities need (noise bound, declared honest/Byzantine split).
AnalysisReport analyze(const Problem& problem, double noise_bound,
                       std::span<const int> byzantine_ids,
                       std::size_t guard = kSubsetGuard);

namespace detail {

/// Number of k-subsets of [0, n), saturating at `cap`.
std::size_t subset_count(int n, int k, std::size_t cap);

/// The index-th k-subset of [0, n) in lexicographic order.
std::vector<int> unrank_subset(std::size_t index, int n, int k);

/// min over all k-subsets S of the smallest eigenvalue of sum_{i in S}
/// grams[i]. OpenMP-parallel over a lexicographic unranking of the
/// subsets; the reduction is an exact min, so the result is identical to
/// the serial reference for any thread count.
double min_subset_gram_eigen(std::span<const Matrix> grams, int k,
                             std::size_t guard);

/// Serial reference for min_subset_gram_eigen, kept for tests and
/// benchmarks.
double min_subset_gram_eigen_serial(std::span<const Matrix> grams, int k,
                                    std::size_t guard);

}  // namespace detail

}  // namespace byzgrad::analysis
