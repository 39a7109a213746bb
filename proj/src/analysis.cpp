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

#include "byzgrad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <omp.h>

#include <Eigen/Eigenvalues>

namespace byzgrad::analysis {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kPsdClampTol = 1e-9;
constexpr double kRankTol = 1e-9;

std::vector<Matrix> agent_grams(std::span<const AgentData> agents) {
  std::vector<Matrix> grams;
  grams.reserve(agents.size());
  for (const AgentData& a : agents) grams.push_back(a.x.transpose() * a.x);
  return grams;
}

double smallest_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric,
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

void check_guard(int n, int k, std::size_t guard, std::size_t count) {
  if (count > guard) {
    std::ostringstream msg;
    msg << "C(" << n << ", " << k << ") subsets exceed the enumeration guard "
        << guard << "; pass a larger guard explicitly to override";
    throw GuardExceeded(msg.str());
  }
}

}  // namespace

namespace detail {

std::size_t subset_count(int n, int k, std::size_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t count = 1;
  for (int i = 1; i <= k; ++i) {
    // count * (n - k + i) is i * C(n - k + i, i), so the division below
    // is exact at every step.
    const std::size_t numerator = static_cast<std::size_t>(n - k + i);
    if (count > std::numeric_limits<std::size_t>::max() / numerator) {
      return cap + 1;  // would overflow, certainly over any sane cap
    }
    count = count * numerator / static_cast<std::size_t>(i);
    if (count > cap) return cap + 1;
  }
  return count;
}

std::vector<int> unrank_subset(std::size_t index, int n, int k) {
  // Lexicographic unranking: pick the smallest feasible element, then
  // recurse on the remaining positions.
  std::vector<int> subset;
  subset.reserve(static_cast<std::size_t>(k));
  int next = 0;
  for (int remaining = k; remaining > 0; --remaining) {
    for (int candidate = next;; ++candidate) {
      const std::size_t with_candidate = subset_count(
          n - candidate - 1, remaining - 1,
          std::numeric_limits<std::size_t>::max() - 2);
      if (index < with_candidate) {
        subset.push_back(candidate);
        next = candidate + 1;
        break;
      }
      index -= with_candidate;
    }
  }
  return subset;
}

namespace {

// Advances to the next lexicographic k-subset of [0, n); false at the end.
bool next_subset(std::vector<int>& subset, int n) {
  const int k = static_cast<int>(subset.size());
  int pos = k - 1;
  while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) {
    --pos;
  }
  if (pos < 0) return false;
  ++subset[static_cast<std::size_t>(pos)];
  for (int j = pos + 1; j < k; ++j) {
    subset[static_cast<std::size_t>(j)] =
        subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

double subset_eigen(std::span<const Matrix> grams,
                    const std::vector<int>& subset) {
  Matrix gram = grams[static_cast<std::size_t>(subset[0])];
  for (std::size_t j = 1; j < subset.size(); ++j) {
    gram += grams[static_cast<std::size_t>(subset[j])];
  }
  return smallest_eigenvalue(gram);
}

}  // namespace

double min_subset_gram_eigen(std::span<const Matrix> grams, int k,
                             std::size_t guard) {
  const int n = static_cast<int>(grams.size());
  if (k < 1 || k > n) throw InvalidInput("subset size out of range");
  const std::size_t count = subset_count(n, k, guard);
  check_guard(n, k, guard, count);

  // Each thread unranks the start of its contiguous chunk once and walks
  // the odometer from there; the min reduction is exact, so the result
  // matches the serial reference for any thread count.
  double min_eigen = std::numeric_limits<double>::infinity();
#pragma omp parallel reduction(min : min_eigen)
  {
    const std::size_t threads =
        static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t begin = count * tid / threads;
    const std::size_t end = count * (tid + 1) / threads;
    if (begin < end) {
      std::vector<int> subset = unrank_subset(begin, n, k);
      for (std::size_t index = begin; index < end; ++index) {
        min_eigen = std::min(min_eigen, subset_eigen(grams, subset));
        if (index + 1 < end) next_subset(subset, n);
      }
    }
  }
  return min_eigen;
}

double min_subset_gram_eigen_serial(std::span<const Matrix> grams, int k,
                                    std::size_t guard) {
  const int n = static_cast<int>(grams.size());
  if (k < 1 || k > n) throw InvalidInput("subset size out of range");
  check_guard(n, k, guard, subset_count(n, k, guard));

  std::vector<int> subset(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
  double min_eigen = std::numeric_limits<double>::infinity();
  do {
    min_eigen = std::min(min_eigen, subset_eigen(grams, subset));
  } while (next_subset(subset, n));
  return min_eigen;
}

}  // namespace detail

std::pair<double, double> symmetric_eigen_extremes(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("matrix is not square");
  const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kSymmetryTol) {
    std::ostringstream msg;
    msg << "matrix is not symmetric (max asymmetry " << asymmetry << ")";
    throw InvalidInput(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  double smallest = solver.eigenvalues()(0);
  const double largest = solver.eigenvalues()(m.rows() - 1);
  if (smallest < 0.0 && smallest >= -kPsdClampTol) smallest = 0.0;
  return {smallest, largest};
}

double compute_mu(std::span<const AgentData> agents) {
  if (agents.empty()) throw InvalidInput("mu needs at least one agent");
  double mu = 0.0;
  for (const AgentData& a : agents) {
    mu = std::max(mu, symmetric_eigen_extremes(a.x.transpose() * a.x).second);
  }
  return mu;
}

double compute_lambda(std::span<const AgentData> agents, int f,
                      std::size_t guard) {
  const int n = static_cast<int>(agents.size());
  const int k = n - f;
  if (k < 1) throw InvalidInput("n - f must be >= 1");
  const std::vector<Matrix> grams = agent_grams(agents);
  const double min_eigen = detail::min_subset_gram_eigen(grams, k, guard);
  return std::max(min_eigen, 0.0) / static_cast<double>(k);
}

double compute_gamma(std::span<const AgentData> agents, int f,
                     std::size_t guard) {
  const int n = static_cast<int>(agents.size());
  const int k = n - 2 * f;
  if (k < 1) throw InvalidInput("n - 2f must be >= 1");
  const std::vector<Matrix> grams = agent_grams(agents);
  const double min_eigen = detail::min_subset_gram_eigen(grams, k, guard);
  return std::max(min_eigen, 0.0) / static_cast<double>(k);
}

Thresholds thresholds(double mu, double lambda, double gamma) {
  Thresholds out;
  if (mu > 0.0 && lambda > 0.0) out.t1 = 1.0 / (1.0 + 2.0 * mu / lambda);
  if (mu > 0.0 && gamma > 0.0) {
    out.t2 = 1.0 / (2.0 + mu / gamma);
    out.a2 = 1.0 / (2.0 + mu / gamma - gamma / mu);
  }
  return out;
}

std::pair<double, double> constant_step_and_rate(int n, int f, double mu,
                                                 double gamma) {
  if (mu <= 0.0) throw InvalidInput("mu must be positive");
  const double margin =
      static_cast<double>(n) * gamma - static_cast<double>(f) * (2.0 * gamma + mu);
  if (margin <= 0.0) {
    std::ostringstream msg;
    msg << "linear-rate condition fails: n*gamma - f*(2*gamma + mu) = "
        << margin << " <= 0";
    throw InvalidInput(msg.str());
  }
  const double denom = mu * mu * static_cast<double>(n - f) *
                       static_cast<double>(n - f);
  const double eta = margin / denom;
  const double rho_sq = 1.0 - 2.0 * eta * margin + denom * eta * eta;
  return {eta, std::sqrt(std::max(rho_sq, 0.0))};
}

double noise_radius(int n, int f, double mu, double gamma,
                    std::span<const AgentData> agents, double xi) {
  if (xi < 0.0) throw InvalidInput("xi must be >= 0");
  if (gamma <= 0.0) throw InvalidInput("gamma must be positive");
  const double f_over_n = static_cast<double>(f) / static_cast<double>(n);
  const double denom = 1.0 - f_over_n * (2.0 + mu / gamma);
  if (denom <= 0.0) {
    throw InvalidInput("noise radius undefined: f/n violates the tolerance "
                       "condition");
  }
  // Per-report perturbation bound: u * xi with u the largest row-space
  // gain sqrt(eig_max(X_i X_i^T)) over the agents.
  double u = 0.0;
  for (const AgentData& a : agents) {
    u = std::max(
        u, std::sqrt(symmetric_eigen_extremes(a.x * a.x.transpose()).second));
  }
  const double d_bound = u * xi;
  return (1.0 / gamma) * ((1.0 - 2.0 * f_over_n) / denom) * d_bound;
}

bool sparse_observability(std::span<const AgentData> agents, int f,
                          std::size_t guard) {
  const int n = static_cast<int>(agents.size());
  const int k = n - 2 * f;
  if (k < 1) throw InvalidInput("n - 2f must be >= 1");
  const std::vector<Matrix> grams = agent_grams(agents);
  const double min_eigen = detail::min_subset_gram_eigen(grams, k, guard);
  // Smallest singular value of the worst stacked matrix.
  return std::sqrt(std::max(min_eigen, 0.0)) > kRankTol;
}

Vector su_assumption_check(std::span<const AgentData> agents,
                           std::span<const int> honest_ids,
                           std::span<const int> byzantine_ids) {
  if (honest_ids.empty()) throw InvalidInput("honest set is empty");
  std::unordered_set<int> byz(byzantine_ids.begin(), byzantine_ids.end());
  for (int id : honest_ids) {
    if (byz.count(id)) {
      throw InvalidInput("honest and byzantine sets overlap");
    }
  }
  if (honest_ids.size() <= byzantine_ids.size()) {
    throw InvalidInput("need more honest than byzantine agents");
  }
  const int d = agents.front().dim();
  const double divisor =
      static_cast<double>(honest_ids.size()) - static_cast<double>(byzantine_ids.size());
  Vector values = Vector::Zero(d);
  const Matrix identity = Matrix::Identity(d, d);
  for (int id : honest_ids) {
    if (id < 0 || id >= static_cast<int>(agents.size())) {
      throw InvalidInput("honest id out of range");
    }
    const AgentData& a = agents[static_cast<std::size_t>(id)];
    const Matrix residual = identity - a.x.transpose() * a.x;
    for (int k = 0; k < d; ++k) {
      values[k] += residual.col(k).cwiseAbs().sum();
    }
  }
  return values / divisor;
}

AnalysisReport analyze(const Problem& problem, double noise_bound,
                       std::span<const int> byzantine_ids, std::size_t guard) {
  AnalysisReport report;
  const int n = problem.n();
  const int f = problem.f;
  report.mu = compute_mu(problem.agents);
  report.lambda = compute_lambda(problem.agents, f, guard);
  report.gamma = compute_gamma(problem.agents, f, guard);

  // Farthest box point from w_star, coordinate-wise.
  Vector extent(problem.dim());
  for (int k = 0; k < problem.dim(); ++k) {
    extent[k] = std::max(std::abs(problem.box.lo[k] - problem.w_star[k]),
                         std::abs(problem.box.hi[k] - problem.w_star[k]));
  }
  report.gamma_big = extent.norm();

  const Thresholds thr = thresholds(report.mu, report.lambda, report.gamma);
  report.thr_t1 = thr.t1;
  report.thr_t2 = thr.t2;
  report.thr_a2 = thr.a2;
  report.f_over_n = static_cast<double>(f) / static_cast<double>(n);
  report.sparse_observable = sparse_observability(problem.agents, f, guard);

  if (report.mu > 0.0 &&
      n * report.gamma - f * (2.0 * report.gamma + report.mu) > 0.0) {
    const auto [eta, rho] = constant_step_and_rate(n, f, report.mu, report.gamma);
    report.eta_star = eta;
    report.rho = rho;
    if (noise_bound > 0.0) {
      report.d_star = noise_radius(n, f, report.mu, report.gamma,
                                   problem.agents, noise_bound);
    }
  }

  std::vector<int> honest;
  std::unordered_set<int> byz(byzantine_ids.begin(), byzantine_ids.end());
  for (int id = 0; id < n; ++id) {
    if (!byz.count(id)) honest.push_back(id);
  }
  report.su_values = su_assumption_check(problem.agents, honest,
                                         byzantine_ids);
  return report;
}

}  // namespace byzgrad::analysis
