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

#include "byzgrad/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "byzgrad/analysis.hpp"

namespace byzgrad::cli {

namespace {

using nlohmann::json;

// Shortest-round-trip formatting: the value parses back bit-exact.
std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

void write_trace_csv(const server::Trace& trace, std::ostream& out) {
  const int d = trace.points.empty()
                    ? 0
                    : static_cast<int>(trace.points.front().w.size());
  out << "t,error";
  for (int k = 0; k < d; ++k) out << ",w_" << k;
  out << ",direction_norm,filtered_ids\n";
  for (const server::TracePoint& p : trace.points) {
    out << p.t << ',' << format_double(p.error);
    for (int k = 0; k < d; ++k) out << ',' << format_double(p.w[k]);
    out << ',' << format_double(p.direction_norm) << ','
        << join_ids(p.filter_set) << '\n';
  }
  if (trace.diverged) out << "# aborted: " << trace.abort_reason << '\n';
}

int cmd_run(const RunConfig& config, const std::string& out_path) {
  const server::Trace trace = server::run(config);
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open output file: " + out_path);
  write_trace_csv(trace, out);
  if (!out.good()) throw IoError("failed writing trace to " + out_path);
  return trace.diverged ? kExitDivergence : kExitOk;
}

std::string report_to_json(const analysis::AnalysisReport& report) {
  json j;
  j["mu"] = report.mu;
  j["lambda"] = report.lambda;
  j["gamma"] = report.gamma;
  j["gamma_big"] = report.gamma_big;
  j["thr_t1"] = report.thr_t1;
  j["thr_t2"] = report.thr_t2;
  j["thr_a2"] = report.thr_a2;
  j["f_over_n"] = report.f_over_n;
  j["pass_t1"] = report.pass_t1();
  j["pass_t2"] = report.pass_t2();
  j["pass_a2"] = report.pass_a2();
  j["eta_star"] = report.eta_star ? json(*report.eta_star) : json(nullptr);
  j["rho"] = report.rho ? json(*report.rho) : json(nullptr);
  j["d_star"] = report.d_star ? json(*report.d_star) : json(nullptr);
  j["sparse_observable"] = report.sparse_observable;
  std::vector<double> su(report.su_values.begin(), report.su_values.end());
  j["su_values"] = su;
  return j.dump(2) + "\n";
}

int cmd_analyze(const RunConfig& config, const std::string& out_path,
                std::ostream& summary) {
  const Problem problem = build_problem(config);
  const std::vector<int> byz = resolve_byzantine_ids(config, problem.n());
  const double xi = config.problem.noise.kind == NoiseModel::Kind::BoundedResponse
                        ? config.problem.noise.bound
                        : 0.0;
  const analysis::AnalysisReport report = analysis::analyze(problem, xi, byz);

  const auto verdict = [](bool pass) { return pass ? "PASS" : "FAIL"; };
  summary << "agents: " << problem.n() << "  d: " << problem.dim()
          << "  f: " << problem.f << "  f/n: " << report.f_over_n << "\n";
  summary << "mu        = " << report.mu << "\n";
  summary << "lambda    = " << report.lambda << "\n";
  summary << "gamma     = " << report.gamma << "\n";
  summary << "Gamma_box = " << report.gamma_big << "\n";
  summary << "tolerance conditions on f/n:\n";
  summary << "  norm filter, diminishing step   : f/n < " << report.thr_t1
          << "  " << verdict(report.pass_t1()) << "\n";
  summary << "  norm filter, uniform redundancy : f/n < " << report.thr_t2
          << "  " << verdict(report.pass_t2()) << "\n";
  summary << "  norm-cap filter                 : f/n < " << report.thr_a2
          << "  " << verdict(report.pass_a2()) << "\n";
  summary << "sparse_observable: "
          << (report.sparse_observable ? "true" : "false") << "\n";
  summary << "su_values:";
  for (int k = 0; k < report.su_values.size(); ++k) {
    summary << ' ' << report.su_values[k];
  }
  summary << "\n";
  if (report.eta_star) {
    summary << "eta_star  = " << *report.eta_star << "\n";
    summary << "rho       = " << *report.rho << "\n";
  }
  if (report.d_star) summary << "d_star    = " << *report.d_star << "\n";

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open output file: " + out_path);
  out << report_to_json(report);
  if (!out.good()) throw IoError("failed writing report to " + out_path);
  return kExitOk;
}

int cmd_sweep(const std::string& base_config_json,
              const std::vector<SweepAxis>& axes, const std::string& out_path) {
  if (axes.size() > 2) throw InvalidInput("sweep supports at most two axes");

  struct Cell {
    std::vector<std::string> values;  // one per axis
    double final_error = std::nan("");
    bool converged = false;
  };
  std::vector<Cell> cells;
  if (axes.size() == 1) {
    for (const std::string& v : axes[0].values) cells.push_back({{v}});
  } else if (axes.size() == 2) {
    for (const std::string& a : axes[0].values) {
      for (const std::string& b : axes[1].values) cells.push_back({{a, b}});
    }
  }

  const std::int64_t total = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < total; ++i) {
    Cell& cell = cells[static_cast<std::size_t>(i)];
    try {
      std::vector<std::string> overrides;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        overrides.push_back(axes[a].key + "=" + cell.values[a]);
      }
      const RunConfig config = parse_config(base_config_json, overrides);
      const server::Trace trace = server::run(config);
      if (!trace.points.empty()) {
        cell.final_error = trace.points.back().error;
      }
      cell.converged = !trace.diverged;
    } catch (const std::exception&) {
      cell.converged = false;  // recorded as a failed cell; sweep continues
    }
  }

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open output file: " + out_path);
  for (std::size_t a = 0; a < axes.size(); ++a) {
    out << axes[a].key << ',';
  }
  out << "final_error,converged\n";
  for (const Cell& cell : cells) {
    for (const std::string& v : cell.values) out << v << ',';
    out << format_double(cell.final_error) << ','
        << (cell.converged ? "true" : "false") << '\n';
  }
  if (!out.good()) throw IoError("failed writing sweep to " + out_path);
  return kExitOk;
}

}  // namespace byzgrad::cli
