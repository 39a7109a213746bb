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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "byzgrad/analysis.hpp"
#include "byzgrad/cli.hpp"
#include "byzgrad/core.hpp"
#include "byzgrad/filters.hpp"
#include "byzgrad/run_config.hpp"
#include "byzgrad/scheduler.hpp"
#include "byzgrad/server.hpp"
#include "../oracles.hpp"

using namespace byzgrad;

namespace {

const std::string kConfigDir = BYZGRAD_CONFIG_DIR;

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

double final_error(const server::Trace& trace) {
  return trace.points.back().error;
}

RunConfig bundled(const std::string& name,
                  const std::vector<std::string>& overrides = {}) {
  return cli::load_config(kConfigDir + "/" + name, overrides);
}

std::string fmt(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

// Full-precision text form, for overrides that must round-trip exactly.
std::string precise(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// --- criterion 1: the fan experiment converges under the omniscient
// adversary, for every single Byzantine identity, quickly. ---
Criterion criterion_1() {
  Criterion c;
  const server::Trace base = server::run(bundled("paper_sec10.json"));
  c.require(base.points.size() == 51, "trace has 51 points");
  c.require(std::abs(base.points[0].error - std::sqrt(2.0)) < 1e-12,
            "initial error is sqrt(2)");
  c.require(final_error(base) < base.points[0].error,
            "error at t=50 dropped below the initial error");

  const auto start = std::chrono::steady_clock::now();
  const server::Trace long_run =
      server::run(bundled("paper_sec10.json", {"horizon=500"}));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  c.require(final_error(long_run) < 1e-2,
            "error at t=500 is " + fmt(final_error(long_run)) + " >= 1e-2");

  for (int byz = 0; byz < 6; ++byz) {
    const server::Trace trace = server::run(bundled(
        "paper_sec10.json",
        {"horizon=500", "byzantine_ids=[" + std::to_string(byz) + "]"}));
    c.require(final_error(trace) < 1e-2,
              "byzantine id " + std::to_string(byz) + " final error " +
                  fmt(final_error(trace)));
  }
  c.require(seconds < 1.0, "500-iteration run took " + fmt(seconds) + " s");
  return c;
}

// --- criterion 2: analysis constants on the fan data. ---
Criterion criterion_2() {
  Criterion c;
  const RunConfig config = bundled("paper_sec10.json");
  const Problem problem = build_problem(config);
  const std::vector<int> byz = resolve_byzantine_ids(config, problem.n());
  const analysis::AnalysisReport report = analysis::analyze(problem, 0.0, byz);

  c.require(std::abs(report.mu - 1.0) <= 1e-9, "mu = " + fmt(report.mu));
  c.require(report.gamma >= 0.258, "gamma = " + fmt(report.gamma));
  c.require(report.thr_t2 >= 0.17, "thr_t2 = " + fmt(report.thr_t2));
  c.require(report.f_over_n <= 0.167, "f/n = " + fmt(report.f_over_n));
  c.require(report.pass_t2(), "f/n condition for the norm filter");
  c.require(report.sparse_observable, "sparse observability");
  c.require(std::abs(report.su_values[0] - 1.015) <= 1e-3,
            "su_values[0] = " + fmt(report.su_values[0]));
  c.require(report.su_values[1] <= 0.92,
            "su_values[1] = " + fmt(report.su_values[1]));
  return c;
}

// --- criterion 3: the unfiltered baseline is wrecked by the random
// adversary while the norm filter converges on the same seed. ---
Criterion criterion_3() {
  Criterion c;
  const server::Trace unfiltered =
      server::run(bundled("paper_sec10_random.json", {"filter=no_filter"}));
  const server::Trace filtered =
      server::run(bundled("paper_sec10_random.json"));
  c.require(final_error(unfiltered) >= 10.0 * final_error(filtered),
            "contrast " + fmt(final_error(unfiltered)) + " vs " +
                fmt(final_error(filtered)));
  c.require(final_error(unfiltered) > unfiltered.points[0].error,
            "unfiltered run drifts away from the optimum");
  c.require(final_error(filtered) < filtered.points[0].error,
            "norm filter run is improving");
  const server::Trace filtered_long =
      server::run(bundled("paper_sec10_random.json", {"horizon=500"}));
  c.require(final_error(filtered_long) < 1e-2,
            "norm filter error at t=500 is " + fmt(final_error(filtered_long)));
  return c;
}

// --- criterion 4: per-step linear contraction at the constant step size
// computed from the instance constants, under both adversaries. ---
Criterion criterion_4() {
  Criterion c;
  const Problem problem = build_problem(bundled("paper_sec10.json"));
  const double mu = analysis::compute_mu(problem.agents);
  const double gamma = analysis::compute_gamma(problem.agents, problem.f);
  const auto [eta, rho] =
      analysis::constant_step_and_rate(problem.n(), problem.f, mu, gamma);

  for (const std::string adversary : {"omniscient", "random_gradient"}) {
    const RunConfig config = bundled(
        "paper_sec10.json",
        {"horizon=200", "schedule.kind=constant",
         "schedule.eta=" + precise(eta), "adversary.kind=" + adversary});
    const server::Trace trace = server::run(config);
    for (std::size_t t = 0; t + 1 < trace.points.size(); ++t) {
      const double bound = rho * trace.points[t].error + 1e-10;
      if (trace.points[t + 1].error > bound) {
        c.require(false, adversary + " violates the contraction at t=" +
                             std::to_string(t));
        break;
      }
    }
  }
  return c;
}

// --- criterion 5: bounded-delay runs converge and the staleness process
// honors both constraints exactly. ---
Criterion criterion_5() {
  Criterion c;
  for (int t_o : {1, 3, 5}) {
    const RunConfig config =
        bundled("async_to3.json", {"delays.t_o=" + std::to_string(t_o)});
    const server::Trace trace = server::run(config);
    c.require(final_error(trace) < 1e-2,
              "t_o=" + std::to_string(t_o) + " final error " +
                  fmt(final_error(trace)));

    // Replay the exact staleness sequences the run used (same seed).
    scheduler::DelayModel delays = config.delays;
    delays.seed = config.seed;
    scheduler::StalenessProcess process(delays, 6);
    for (int t = 0; t <= config.horizon; ++t) process.advance(t);
    const auto& staleness = process.trace();
    bool bounded = true;
    bool incremental = true;
    for (std::size_t t = 0; t < staleness.size(); ++t) {
      for (int i = 0; i < 6; ++i) {
        const int s = staleness[t][static_cast<std::size_t>(i)];
        bounded = bounded && s >= 0 && s <= t_o;
        if (t > 0) {
          incremental = incremental &&
                        s <= 1 + staleness[t - 1][static_cast<std::size_t>(i)];
        }
      }
    }
    c.require(bounded, "staleness bound for t_o=" + std::to_string(t_o));
    c.require(incremental, "staleness increment rule for t_o=" +
                               std::to_string(t_o));
  }
  return c;
}

// --- criterion 6: with bounded response noise the error settles inside
// the guaranteed radius. ---
Criterion criterion_6() {
  Criterion c;
  const RunConfig config = bundled("noisy_xi01.json");
  const Problem problem = build_problem(config);
  const std::vector<int> byz = resolve_byzantine_ids(config, problem.n());
  const analysis::AnalysisReport report =
      analysis::analyze(problem, config.problem.noise.bound, byz);
  c.require(report.d_star.has_value(), "noise radius defined");
  if (!report.d_star) return c;

  const server::Trace trace = server::run(config);
  c.require(trace.points.size() == 5001, "trace has 5001 points");
  double worst = 0.0;
  for (std::size_t t = trace.points.size() / 2; t < trace.points.size(); ++t) {
    worst = std::max(worst, trace.points[t].error);
  }
  c.require(worst <= *report.d_star, "worst late error " + fmt(worst) +
                                         " vs radius " + fmt(*report.d_star));
  return c;
}

// --- criterion 7: norm-cap filtering converges under both adversaries
// and its tolerance threshold clears f/n. ---
Criterion criterion_7() {
  Criterion c;
  for (const std::string adversary : {"omniscient", "random_gradient"}) {
    const server::Trace trace = server::run(
        bundled("paper_sec10.json",
                {"horizon=500", "filter=norm_cap_filter",
                 "adversary.kind=" + adversary}));
    c.require(final_error(trace) < 1e-2,
              adversary + " final error " + fmt(final_error(trace)));
  }
  const Problem problem = build_problem(bundled("paper_sec10.json"));
  const double mu = analysis::compute_mu(problem.agents);
  const double gamma = analysis::compute_gamma(problem.agents, problem.f);
  const double thr_a2 = analysis::thresholds(mu, 1.0, gamma).a2;
  c.require(thr_a2 > 1.0 / 6.0, "thr_a2 = " + fmt(thr_a2));
  return c;
}

// --- criterion 8: property suites. ---
Criterion criterion_8() {
  Criterion c;
  std::mt19937_64 rng(2024);

  // (a) homogeneity, permutation invariance, zero fixed point.
  {
    std::normal_distribution<double> coord(0.0, 5.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    bool homogeneous = true;
    bool permutable = true;
    bool zero_fixed = true;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 5 + trial % 4;
      const int f = 1 + trial % 2;
      const int d = 2 + trial % 3;
      std::vector<GradientReport> reports;
      for (int i = 0; i < n; ++i) {
        GradientReport r;
        r.agent_id = i;
        r.g = Vector(d);
        for (int k = 0; k < d; ++k) r.g[k] = coord(rng);
        reports.push_back(std::move(r));
      }
      const auto kinds = {filters::FilterKind::NormFilter,
                          filters::FilterKind::NormCapFilter,
                          filters::FilterKind::NormalizeFilter};
      for (const auto kind : kinds) {
        const Vector base = filters::aggregate(kind, reports, f);

        const double factor = scale(rng);
        std::vector<GradientReport> scaled = reports;
        for (GradientReport& r : scaled) r.g *= factor;
        const Vector widened = filters::aggregate(kind, scaled, f);
        homogeneous = homogeneous &&
                      (widened - factor * base).norm() <=
                          1e-9 * std::max(1.0, factor * base.norm());

        std::vector<GradientReport> shuffled = reports;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        permutable = permutable &&
                     (filters::aggregate(kind, shuffled, f) - base).norm() == 0.0;
      }

      std::vector<GradientReport> zeros = reports;
      for (int i = 0; i < n - f; ++i) zeros[static_cast<std::size_t>(i)].g.setZero();
      std::shuffle(zeros.begin(), zeros.end(), rng);
      for (const auto kind : {filters::FilterKind::NormFilter,
                              filters::FilterKind::NormCapFilter}) {
        zero_fixed = zero_fixed &&
                     filters::aggregate(kind, zeros, f).norm() == 0.0;
      }
    }
    c.require(homogeneous, "positive homogeneity");
    c.require(permutable, "permutation invariance");
    c.require(zero_fixed, "zero fixed point");
  }

  // (b) mu dominates lambda and gamma on random full-rank instances.
  {
    std::normal_distribution<double> entry(0.0, 1.0);
    bool dominated = true;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 5 + trial % 4;
      const int d = 2 + trial % 2;
      const int f = trial % 3 == 0 ? 0 : 1;
      std::vector<AgentData> agents;
      for (int i = 0; i < n; ++i) {
        AgentData a;
        a.id = i;
        a.x = Matrix(d + 1, d);
        for (int r = 0; r < d + 1; ++r) {
          for (int col = 0; col < d; ++col) a.x(r, col) = entry(rng);
        }
        a.y = Vector::Zero(d + 1);
        agents.push_back(std::move(a));
      }
      const double mu = analysis::compute_mu(agents);
      dominated = dominated &&
                  mu >= analysis::compute_lambda(agents, f) - 1e-9 &&
                  mu >= analysis::compute_gamma(agents, f) - 1e-9;
    }
    c.require(dominated, "mu >= lambda and mu >= gamma");
  }

  // (c) projection non-expansiveness.
  {
    ConstraintBox box;
    box.lo = Vector::Constant(3, -2.0);
    box.hi = Vector::Constant(3, 5.0);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    bool nonexpansive = true;
    for (int trial = 0; trial < 1000; ++trial) {
      Vector u(3), v(3);
      for (int k = 0; k < 3; ++k) {
        u[k] = coord(rng);
        v[k] = coord(rng);
      }
      nonexpansive = nonexpansive &&
                     (server::project_box(u, box) - server::project_box(v, box))
                             .norm() <= (u - v).norm() + 1e-12;
    }
    c.require(nonexpansive, "projection non-expansiveness");
  }

  // (d) analytic gradient vs central finite differences.
  {
    const Problem problem = oracle::fan_problem();
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    double worst = 0.0;
    for (int trial = 0; trial < 250; ++trial) {
      Vector w(2);
      w << coord(rng), coord(rng);
      for (const AgentData& agent : problem.agents) {
        const Vector analytic = core::gradient(agent, w);
        const Vector numeric = oracle::finite_difference_gradient(agent, w);
        worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff());
      }
    }
    c.require(worst <= 1e-5, "finite-difference deviation " + fmt(worst));
  }

  // (e) byte-identical reruns of every bundled config.
  {
    for (const char* name : {"paper_sec10.json", "paper_sec10_random.json",
                             "async_to3.json", "noisy_xi01.json"}) {
      const RunConfig config = bundled(name);
      std::ostringstream first, second;
      cli::write_trace_csv(server::run(config), first);
      cli::write_trace_csv(server::run(config), second);
      c.require(first.str() == second.str(),
                std::string("determinism of ") + name);
    }
  }
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {"1 fan experiment converges under the omniscient adversary",
       criterion_1},
      {"2 analysis constants on the fan data", criterion_2},
      {"3 unfiltered baseline loses to the norm filter by 10x", criterion_3},
      {"4 per-step linear contraction at the constant step", criterion_4},
      {"5 bounded-delay convergence and staleness invariants", criterion_5},
      {"6 noisy responses settle inside the guaranteed radius", criterion_6},
      {"7 norm-cap filter converges and clears its threshold", criterion_7},
      {"8 property suites", criterion_8},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    Criterion result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << "exception: " << e.what();
    }
    if (result.ok) {
      std::printf("[PASS] criterion %s\n", entry.name);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %s: %s\n", entry.name,
                  result.detail.str().c_str());
    }
  }
  return failures;
}
