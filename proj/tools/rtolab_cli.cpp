// Copyright 2026 The rtolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rtolab command-line driver.
//
//   rtolab run <scenario> [--config F] [--set k=v ...] [--seed N] [--trace F] [--summary F]
//   rtolab sweep <scenario> --axis name=v1,v2,... --seed N [--out F]
//   rtolab list-policies
//
// Exit status: 0 success, 2 configuration error, 3 I/O error.

#include <CLI11.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rtolab/config.hpp"
#include "rtolab/metrics_report.hpp"
#include "rtolab/scenarios.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string scenario;
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("scenario", a.scenario, "Scenario name (see rtolab run --help)");
  cmd->add_option("--config", a.config_path, "Config file of key = value lines");
  cmd->add_option("--set", a.sets, "Override one key, key=value (repeatable)")->take_all();
  cmd->add_option("--seed", a.seed, "Random seed");
}

rtolab::ConfigMap assemble(const CommonArgs& a) {
  rtolab::ConfigMap user;
  if (!a.config_path.empty()) {
    try {
      user = rtolab::load_config_file(a.config_path);
    } catch (const std::ios_base::failure& e) {
      throw IoError(e.what());
    }
  }
  if (!a.scenario.empty()) user["scenario"] = a.scenario;
  std::vector<std::string> later;
  for (const auto& s : a.sets) {
    auto one = rtolab::parse_config_text(s);
    if (one.size() != 1) throw rtolab::ConfigError("--set expects key=value, got '" + s + "'");
    if (one.begin()->first == "scenario") {
      user["scenario"] = one.begin()->second;
    } else {
      later.push_back(s);
    }
  }
  if (!user.contains("scenario")) throw rtolab::ConfigError("no scenario given");
  rtolab::ConfigMap full = rtolab::resolve_config(user);
  for (const auto& s : later) rtolab::apply_override(full, s);
  if (a.seed) full["seed"] = std::to_string(*a.seed);
  return full;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<double> parse_axis_values(const std::string& list) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    const std::string item = list.substr(start, end - start);
    char* stop = nullptr;
    errno = 0;
    const double v = std::strtod(item.c_str(), &stop);
    if (item.empty() || stop != item.c_str() + item.size() || errno == ERANGE)
      throw rtolab::ConfigError("bad sweep value '" + item + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retransmission timeout algorithm laboratory"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string trace_path, summary_path;
  bool dump = false;
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_args);
  run->add_option("--trace", trace_path, "Write the trace CSV here");
  run->add_option("--summary", summary_path, "Write the summary here");
  run->add_flag("--dump-config", dump, "Print the resolved config and exit");

  CommonArgs sweep_args;
  std::string axis, out_path;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per value of one parameter");
  add_common(sweep, sweep_args);
  sweep->add_option("--axis", axis, "Parameter and values, name=v1,v2,...")->required();
  sweep->add_option("--out", out_path, "Write the CSV here instead of stdout");
  sweep->get_option("--seed")->required();

  auto* list = app.add_subcommand("list-policies", "Print the policy identifiers of every layer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (list->parsed()) {
      std::cout << rtolab::policy_catalog();
      return 0;
    }
    if (run->parsed()) {
      const auto config = assemble(run_args);
      if (dump) {
        std::cout << rtolab::format_config(config);
        return 0;
      }
      const auto scenario = rtolab::build_scenario(config);
      const auto result = rtolab::run_scenario(scenario);
      if (!trace_path.empty()) write_file(trace_path, rtolab::format_trace(result.trace));
      if (!summary_path.empty()) write_file(summary_path, rtolab::format_summary(result.summary));
      std::cout << "verdict=" << rtolab::to_string(result.summary.verdict) << '\n';
      return 0;
    }
    if (sweep->parsed()) {
      const auto config = assemble(sweep_args);
      const auto eq = axis.find('=');
      if (eq == std::string::npos) throw rtolab::ConfigError("--axis expects name=v1,v2,...");
      const auto rows = rtolab::sweep(config, axis.substr(0, eq), parse_axis_values(axis.substr(eq + 1)));
      const std::string csv = rtolab::format_sweep_csv(rows);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        write_file(out_path, csv);
      }
      return 0;
    }
  } catch (const rtolab::ConfigError& e) {
    std::cerr << "rtolab: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "rtolab: " << e.what() << '\n';
    return kIoError;
  }
  return 0;
}
