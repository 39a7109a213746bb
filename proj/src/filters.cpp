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

#include "byzgrad/filters.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace byzgrad::filters {

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::NoFilter: return "no_filter";
    case FilterKind::NormFilter: return "norm_filter";
    case FilterKind::NormCapFilter: return "norm_cap_filter";
    case FilterKind::NormalizeFilter: return "normalize_filter";
  }
  throw InvalidInput("unknown filter kind");
}

FilterKind filter_from_string(const std::string& name) {
  if (name == "no_filter") return FilterKind::NoFilter;
  if (name == "norm_filter") return FilterKind::NormFilter;
  if (name == "norm_cap_filter") return FilterKind::NormCapFilter;
  if (name == "normalize_filter") return FilterKind::NormalizeFilter;
  throw InvalidInput("unknown filter: " + name);
}

namespace {

struct RankedReport {
  double norm;
  int agent_id;
  const GradientReport* report;
};

// Norms plus the deterministic (norm, id) order shared by every filter.
std::vector<RankedReport> ranked(std::span<const GradientReport> reports) {
  std::vector<RankedReport> out;
  out.reserve(reports.size());
  std::unordered_set<int> seen;
  for (const GradientReport& r : reports) {
    if (!r.g.allFinite()) {
      std::ostringstream msg;
      msg << "report from agent " << r.agent_id << " is non-finite";
      throw InvalidInput(msg.str());
    }
    if (!seen.insert(r.agent_id).second) {
      std::ostringstream msg;
      msg << "duplicate report for agent " << r.agent_id;
      throw InvalidInput(msg.str());
    }
    out.push_back({r.g.norm(), r.agent_id, &r});
  }
  std::sort(out.begin(), out.end(), [](const RankedReport& a, const RankedReport& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.agent_id < b.agent_id;
  });
  return out;
}

}  // namespace

std::vector<int> sort_by_norm(std::span<const GradientReport> reports) {
  std::vector<int> order;
  order.reserve(reports.size());
  for (const RankedReport& r : ranked(reports)) order.push_back(r.agent_id);
  return order;
}

Aggregate aggregate_detailed(FilterKind kind,
                             std::span<const GradientReport> reports, int f) {
  if (reports.empty()) throw InvalidInput("no reports to aggregate");
  const int n = static_cast<int>(reports.size());
  const int d = static_cast<int>(reports.front().g.size());
  const std::vector<RankedReport> order = ranked(reports);
  for (const RankedReport& r : order) {
    if (r.report->g.size() != d) {
      throw InvalidInput("reports have mixed dimensions");
    }
  }

  Aggregate out;
  out.direction = Vector::Zero(d);

  if (kind == FilterKind::NoFilter) {
    for (const RankedReport& r : order) {
      out.direction += r.report->g;
      out.filter_set.push_back(r.agent_id);
    }
    std::sort(out.filter_set.begin(), out.filter_set.end());
    return out;
  }

  if (f < 0) throw InvalidInput("f must be non-negative");
  if (n <= 2 * f) {
    std::ostringstream msg;
    msg << "filtered aggregation needs n > 2f (n = " << n << ", f = " << f
        << ")";
    throw InvalidInput(msg.str());
  }

  const int kept = n - f;
  // Norm of the (n-f)-th smallest report: the cap every surviving
  // contribution is bounded by.
  const double cap = order[kept - 1].norm;

  switch (kind) {
    case FilterKind::NormFilter:
      for (int i = 0; i < kept; ++i) {
        out.direction += order[i].report->g;
        out.filter_set.push_back(order[i].agent_id);
      }
      break;
    case FilterKind::NormCapFilter:
      for (int i = 0; i < kept; ++i) {
        out.direction += order[i].report->g;
        out.filter_set.push_back(order[i].agent_id);
      }
      for (int i = kept; i < n; ++i) {
        if (order[i].norm > 0.0) {
          out.direction += order[i].report->g * (cap / order[i].norm);
        }
        out.capped_ids.push_back(order[i].agent_id);
      }
      break;
    case FilterKind::NormalizeFilter:
      for (int i = 0; i < n; ++i) {
        if (order[i].norm > 0.0) {
          out.direction += order[i].report->g * (cap / order[i].norm);
        }
        out.filter_set.push_back(order[i].agent_id);
      }
      break;
    case FilterKind::NoFilter:
      break;  // handled above
  }
  std::sort(out.filter_set.begin(), out.filter_set.end());
  std::sort(out.capped_ids.begin(), out.capped_ids.end());
  return out;
}

Vector aggregate(FilterKind kind, std::span<const GradientReport> reports,
                 int f) {
  return aggregate_detailed(kind, reports, f).direction;
}

}  // namespace byzgrad::filters
