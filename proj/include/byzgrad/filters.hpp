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

#include <span>
#include <string>
#include <vector>

#include "byzgrad/types.hpp"

namespace byzgrad::filters {

/// The robust aggregation rule applied to the per-tick report list.
///
/// - NoFilter: plain sum of all reports (unfiltered baseline).
/// - NormFilter: drop the f largest-norm reports, sum the rest.
/// - NormCapFilter: keep everything, but rescale each of the f largest
///   reports down to the (n-f)-th smallest norm (zero stays zero).
/// - NormalizeFilter: rescale every non-zero report to the (n-f)-th
///   smallest norm and sum all of them. No convergence guarantee is
///   known for this variant; treat it as experimental.
enum class FilterKind { NoFilter, NormFilter, NormCapFilter, NormalizeFilter };

std::string to_string(FilterKind kind);
FilterKind filter_from_string(const std::string& name);

/// Agent ids ordered by ascending report norm, ties broken by ascending
/// agent id. Throws InvalidInput on duplicate ids or non-finite reports.
std::vector<int> sort_by_norm(std::span<const GradientReport> reports);

/// Aggregation outcome plus the bookkeeping the trace records.
struct Aggregate {
  Vector direction;
  std::vector<int> filter_set;  // ids whose raw report entered the sum
  std::vector<int> capped_ids;  // ids rescaled by NormCapFilter (empty otherwise)
};

/// Applies the filter to the reports. The filtered kinds require
/// reports.size() > 2f. Summation runs in ascending (norm, id) order, so
/// the result is invariant under permutations of the input list.
/// Cost is O(n (d + log n)).
Aggregate aggregate_detailed(FilterKind kind,
                             std::span<const GradientReport> reports, int f);

Vector aggregate(FilterKind kind, std::span<const GradientReport> reports,
                 int f);

}  // namespace byzgrad::filters
