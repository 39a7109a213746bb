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

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "byzgrad/cli.hpp"
#include "byzgrad/core.hpp"
#include "byzgrad/run_config.hpp"

namespace byzgrad {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw InvalidInput(message);
}

void check_known_keys(const json& object, const std::string& where,
                      std::initializer_list<const char*> known) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) == known.end()) {
      fail("unknown key \"" + key + "\" in " + where);
    }
  }
}

Vector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + " must be a non-empty array");
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) fail(where + " must contain numbers");
    v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(where + " rows must be non-empty arrays");
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(where + " rows must all have the same length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(where + " must contain numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

ProblemSpec parse_problem(const json& j) {
  if (!j.is_object()) fail("\"problem\" must be an object");
  check_known_keys(j, "problem",
                   {"x_blocks", "w_star", "box", "noise", "synthetic"});
  ProblemSpec spec;

  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    check_known_keys(s, "problem.synthetic",
                     {"n_agents", "rows_per_agent", "d", "scale", "w_star"});
    SyntheticSpec synth;
    synth.n_agents = s.at("n_agents").get<int>();
    synth.rows_per_agent = s.value("rows_per_agent", 1);
    synth.d = s.at("d").get<int>();
    synth.scale = s.value("scale", 1.0);
    if (s.contains("w_star")) {
      synth.w_star = parse_vector(s.at("w_star"), "problem.synthetic.w_star");
    }
    if (synth.n_agents < 1) fail("synthetic.n_agents must be >= 1");
    if (synth.rows_per_agent < 1) fail("synthetic.rows_per_agent must be >= 1");
    if (synth.d < 1) fail("synthetic.d must be >= 1");
    if (!(synth.scale > 0.0)) fail("synthetic.scale must be > 0");
    spec.synthetic = std::move(synth);
  }

  if (j.contains("x_blocks")) {
    if (spec.synthetic) fail("give either problem.x_blocks or problem.synthetic, not both");
    const json& blocks = j.at("x_blocks");
    if (!blocks.is_array() || blocks.empty()) {
      fail("problem.x_blocks must be a non-empty array of matrices");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      spec.x_blocks.push_back(
          parse_matrix(blocks[i], "problem.x_blocks[" + std::to_string(i) + "]"));
    }
  }
  if (!spec.synthetic && spec.x_blocks.empty()) {
    fail("problem needs either x_blocks or synthetic");
  }

  if (j.contains("w_star")) {
    spec.w_star = parse_vector(j.at("w_star"), "problem.w_star");
  }
  if (!spec.synthetic && !spec.w_star) fail("problem.w_star is required for inline data");

  if (!j.contains("box")) fail("problem.box is required");
  const json& box = j.at("box");
  check_known_keys(box, "problem.box", {"lo", "hi"});
  spec.box.lo = parse_vector(box.at("lo"), "problem.box.lo");
  spec.box.hi = parse_vector(box.at("hi"), "problem.box.hi");

  if (j.contains("noise")) {
    const json& noise = j.at("noise");
    check_known_keys(noise, "problem.noise", {"kind", "bound"});
    const std::string kind = noise.value("kind", "none");
    if (kind == "none") {
      spec.noise.kind = NoiseModel::Kind::None;
    } else if (kind == "bounded_response") {
      spec.noise.kind = NoiseModel::Kind::BoundedResponse;
      spec.noise.bound = noise.at("bound").get<double>();
      if (spec.noise.bound < 0.0) fail("noise.bound must be >= 0");
    } else {
      fail("unknown noise kind: " + kind);
    }
  }
  return spec;
}

adversaries::AdversaryKind parse_adversary(const json& j) {
  if (!j.is_object()) fail("\"adversary\" must be an object");
  check_known_keys(j, "adversary", {"kind", "sigma", "stop_at"});
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "omniscient") return adversaries::Omniscient{};
  if (kind == "random_gradient") {
    adversaries::RandomGradient adv;
    adv.sigma = j.value("sigma", 10.0);
    if (!(adv.sigma > 0.0)) fail("adversary.sigma must be > 0");
    return adv;
  }
  if (kind == "crash") {
    adversaries::Crash adv;
    adv.stop_at = j.at("stop_at").get<int>();
    if (adv.stop_at < 0) fail("adversary.stop_at must be >= 0");
    return adv;
  }
  fail("unknown adversary kind: " + kind);
}

server::StepSchedule parse_schedule(const json& j) {
  if (!j.is_object()) fail("\"schedule\" must be an object");
  check_known_keys(j, "schedule", {"kind", "c", "eta"});
  server::StepSchedule schedule;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "diminishing") {
    schedule.kind = server::StepSchedule::Kind::Diminishing;
    schedule.value = j.at("c").get<double>();
    if (!(schedule.value > 0.0)) fail("schedule.c must be > 0");
  } else if (kind == "constant") {
    schedule.kind = server::StepSchedule::Kind::Constant;
    schedule.value = j.at("eta").get<double>();
    if (!(schedule.value > 0.0)) fail("schedule.eta must be > 0");
  } else if (kind == "theorem_constant") {
    schedule.kind = server::StepSchedule::Kind::TheoremConstant;
    schedule.value = 0.0;
  } else {
    fail("unknown schedule kind: " + kind);
  }
  return schedule;
}

scheduler::DelayModel parse_delays(const json& j) {
  if (!j.is_object()) fail("\"delays\" must be an object");
  check_known_keys(
      j, "delays",
      {"pattern", "t_o", "deliver_prob", "periods", "outdatedness_limit"});
  scheduler::DelayModel delays;
  const std::string pattern = j.value("pattern", "synchronous");
  if (pattern == "synchronous") {
    delays.pattern = scheduler::DelayPattern::Synchronous;
  } else if (pattern == "random_bounded") {
    delays.pattern = scheduler::DelayPattern::RandomBounded;
  } else if (pattern == "fixed_periodic") {
    delays.pattern = scheduler::DelayPattern::FixedPeriodic;
  } else {
    fail("unknown delay pattern: " + pattern);
  }
  delays.t_o = j.value("t_o", 0);
  delays.deliver_prob = j.value("deliver_prob", 0.7);
  if (j.contains("periods")) {
    if (j.at("periods").is_number_integer()) {
      delays.periods = {j.at("periods").get<int>()};
    } else if (j.at("periods").is_array()) {
      delays.periods = j.at("periods").get<std::vector<int>>();
    } else {
      fail("delays.periods must be an integer or an array of integers");
    }
  }
  if (j.contains("outdatedness_limit")) {
    delays.outdatedness_limit = j.at("outdatedness_limit").get<int>();
  }
  return delays;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("config root must be a JSON object");
  check_known_keys(j, "config",
                   {"problem", "f", "byzantine_ids", "random_byzantine_count",
                    "adversary", "filter", "schedule", "delays", "w0",
                    "horizon", "seed", "out"});
  RunConfig config;
  if (!j.contains("problem")) fail("\"problem\" is required");
  config.problem = parse_problem(j.at("problem"));

  config.f = j.value("f", 0);
  if (config.f < 0) fail("f must be >= 0");

  if (j.contains("byzantine_ids")) {
    config.byzantine_ids = j.at("byzantine_ids").get<std::vector<int>>();
  }
  if (j.contains("random_byzantine_count")) {
    config.random_byzantine_count = j.at("random_byzantine_count").get<int>();
    if (!config.byzantine_ids.empty()) {
      fail("give either byzantine_ids or random_byzantine_count, not both");
    }
    if (*config.random_byzantine_count < 0) {
      fail("random_byzantine_count must be >= 0");
    }
  }

  if (j.contains("adversary")) config.adversary = parse_adversary(j.at("adversary"));
  if (j.contains("filter")) {
    config.filter = filters::filter_from_string(j.at("filter").get<std::string>());
  }
  if (j.contains("schedule")) config.schedule = parse_schedule(j.at("schedule"));
  if (j.contains("delays")) config.delays = parse_delays(j.at("delays"));
  if (j.contains("w0")) config.w0 = parse_vector(j.at("w0"), "w0");
  config.horizon = j.value("horizon", 50);
  if (config.horizon < 0) fail("horizon must be >= 0");
  config.seed = j.value("seed", std::uint64_t{0});
  config.out_path = j.value("out", std::string{});
  return config;
}

// Structural checks that need the agent count; dimension consistency is
// re-validated when the problem is materialized.
void validate_config(const RunConfig& config) {
  const int n = config.problem.synthetic
                    ? config.problem.synthetic->n_agents
                    : static_cast<int>(config.problem.x_blocks.size());
  if (2 * config.f >= n) {
    std::ostringstream msg;
    msg << "A3 violated: 2f >= n (f = " << config.f << ", n = " << n << ")";
    fail(msg.str());
  }
  std::unordered_set<int> seen;
  for (int id : config.byzantine_ids) {
    if (id < 0 || id >= n) {
      std::ostringstream msg;
      msg << "byzantine id " << id << " out of range [0, " << n << ")";
      fail(msg.str());
    }
    if (!seen.insert(id).second) fail("duplicate byzantine id");
  }
  if (static_cast<int>(config.byzantine_ids.size()) > config.f) {
    fail("more byzantine ids than f allows");
  }
  if (config.random_byzantine_count &&
      *config.random_byzantine_count > config.f) {
    fail("random_byzantine_count exceeds f");
  }
  scheduler::validate(config.delays, n);
  const int d = config.problem.synthetic
                    ? config.problem.synthetic->d
                    : static_cast<int>(config.problem.x_blocks.front().cols());
  if (config.problem.box.dim() != d ||
      config.problem.box.hi.size() != d) {
    fail("box dimension does not match the data dimension");
  }
  if (config.w0) {
    if (config.w0->size() != d) fail("w0 dimension does not match d");
    if (!config.problem.box.contains(*config.w0)) {
      fail("w0 lies outside the constraint box");
    }
  }
}

}  // namespace

Problem build_problem(const RunConfig& config) {
  NoiseModel noise = config.problem.noise;
  noise.seed = rng::derive_seed(config.seed, rng::Stream::Noise);

  std::vector<Matrix> blocks;
  Vector w_star;
  if (config.problem.synthetic) {
    const SyntheticSpec& synth = *config.problem.synthetic;
    std::mt19937_64 rng(rng::derive_seed(config.seed, rng::Stream::Synthetic));
    std::normal_distribution<double> entry(0.0, 1.0);
    for (int i = 0; i < synth.n_agents; ++i) {
      Matrix x(synth.rows_per_agent, synth.d);
      for (int r = 0; r < synth.rows_per_agent; ++r) {
        for (int c = 0; c < synth.d; ++c) x(r, c) = synth.scale * entry(rng);
      }
      blocks.push_back(std::move(x));
    }
    if (synth.w_star) {
      w_star = *synth.w_star;
    } else {
      std::uniform_real_distribution<double> coord(-1.0, 1.0);
      w_star.resize(synth.d);
      for (int k = 0; k < synth.d; ++k) w_star[k] = coord(rng);
    }
  } else {
    blocks = config.problem.x_blocks;
    w_star = *config.problem.w_star;
  }
  return core::synthesize_problem(std::move(blocks), w_star, noise, config.f,
                                  config.problem.box);
}

std::vector<int> resolve_byzantine_ids(const RunConfig& config, int n_agents) {
  if (!config.random_byzantine_count) return config.byzantine_ids;
  const int count = *config.random_byzantine_count;
  std::vector<int> pool(static_cast<std::size_t>(n_agents));
  for (int i = 0; i < n_agents; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(
      rng::derive_seed(config.seed, rng::Stream::ByzantineSelection));
  // Partial Fisher-Yates: the first `count` slots become the draw.
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, n_agents - 1);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace cli {

RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into line/column context.
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << "config parse error at line " << line << ", column " << column
        << ": " << e.what();
    throw InvalidInput(msg.str());
  }

  for (const std::string& override_text : overrides) {
    const std::size_t eq = override_text.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail("override must look like key=value: " + override_text);
    }
    std::string path = "/" + override_text.substr(0, eq);
    std::replace(path.begin(), path.end(), '.', '/');
    const std::string raw = override_text.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare words are strings
    }
    try {
      j[json::json_pointer(path)] = value;
    } catch (const json::exception& e) {
      fail("cannot apply override \"" + override_text + "\": " + e.what());
    }
  }

  RunConfig config = config_from_json(j);
  validate_config(config);
  return config;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), overrides);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace cli
}  // namespace byzgrad
