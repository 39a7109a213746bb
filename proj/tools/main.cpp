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
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "byzgrad/cli.hpp"

namespace {

using namespace byzgrad;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

cli::SweepAxis parse_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size()) {
    throw InvalidInput("grid axis must look like key=v1,v2,...: " + text);
  }
  cli::SweepAxis axis;
  axis.key = text.substr(0, eq);
  std::stringstream values(text.substr(eq + 1));
  std::string item;
  while (std::getline(values, item, ',')) axis.values.push_back(item);
  if (axis.values.empty()) throw InvalidInput("grid axis has no values: " + text);
  return axis;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust distributed gradient descent simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  std::vector<std::string> grid_specs;
  std::string seed_text;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--set", overrides,
                    "override a config field, key=value (repeatable)");
    cmd->add_option("--out", out_path, "output file path");
    cmd->add_option("--seed", seed_text, "override the config seed");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment, write the trace CSV");
  add_common(run);
  CLI::App* analyze = app.add_subcommand(
      "analyze", "compute convergence constants and tolerance thresholds");
  add_common(analyze);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run a grid of experiments, write final errors as CSV");
  add_common(sweep);
  sweep->add_option("--grid", grid_specs,
                    "sweep axis, key=v1,v2,... (repeatable, at most two)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!seed_text.empty()) overrides.push_back("seed=" + seed_text);

    if (run->parsed()) {
      const RunConfig config = cli::load_config(config_path, overrides);
      const std::string out =
          !out_path.empty() ? out_path
                            : (!config.out_path.empty() ? config.out_path
                                                        : "trace.csv");
      const int code = cli::cmd_run(config, out);
      if (code == cli::kExitDivergence) {
        std::cerr << "run aborted; partial trace written to " << out << "\n";
      } else {
        std::cout << "trace written to " << out << "\n";
      }
      return code;
    }
    if (analyze->parsed()) {
      const RunConfig config = cli::load_config(config_path, overrides);
      const std::string out = !out_path.empty() ? out_path : "analysis.json";
      const int code = cli::cmd_analyze(config, out, std::cout);
      std::cout << "report written to " << out << "\n";
      return code;
    }
    // sweep
    std::vector<cli::SweepAxis> axes;
    for (const std::string& spec : grid_specs) axes.push_back(parse_axis(spec));
    std::string base = read_file(config_path);
    if (!overrides.empty()) {
      // Bake --set overrides into every cell by pre-validating once.
      (void)cli::parse_config(base, overrides);
      nlohmann::json j = nlohmann::json::parse(base);
      for (const std::string& o : overrides) {
        const std::size_t eq = o.find('=');
        std::string path = "/" + o.substr(0, eq);
        std::replace(path.begin(), path.end(), '.', '/');
        nlohmann::json value;
        try {
          value = nlohmann::json::parse(o.substr(eq + 1));
        } catch (const nlohmann::json::parse_error&) {
          value = o.substr(eq + 1);
        }
        j[nlohmann::json::json_pointer(path)] = value;
      }
      base = j.dump();
    }
    const std::string out = !out_path.empty() ? out_path : "sweep.csv";
    const int code = cli::cmd_sweep(base, axes, out);
    std::cout << "sweep written to " << out << "\n";
    return code;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitValidation;
  }
}
