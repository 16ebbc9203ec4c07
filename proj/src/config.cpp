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

#include "rtolab/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rtolab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::pair<std::string, std::string> split_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key = value, got '" + std::string(line) + "'");
  const auto key = trim(line.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + std::string(line) + "'");
  return {std::string(key), std::string(trim(line.substr(eq + 1)))};
}

const std::string& lookup(const ConfigMap& config, const std::string& key) {
  auto it = config.find(key);
  if (it == config.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

}  // namespace

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      auto [k, v] = split_assignment(line);
      out[k] = v;
    }
    start = end + 1;
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_config(const ConfigMap& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + " = " + v + "\n";
  return out;
}

void apply_override(ConfigMap& config, std::string_view assignment) {
  auto [k, v] = split_assignment(assignment);
  auto it = config.find(k);
  if (it == config.end()) throw ConfigError("unknown config key '" + k + "'");
  it->second = v;
}

void merge_config(ConfigMap& config, const ConfigMap& overrides) {
  for (const auto& [k, v] : overrides) {
    auto it = config.find(k);
    if (it == config.end()) throw ConfigError("unknown config key '" + k + "'");
    it->second = v;
  }
}

double config_double(const ConfigMap& config, const std::string& key) {
  const std::string& s = lookup(config, key);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("config key '" + key + "' expects a number, got '" + s + "'");
  return v;
}

long long config_int(const ConfigMap& config, const std::string& key) {
  const std::string& s = lookup(config, key);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("config key '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

bool config_bool(const ConfigMap& config, const std::string& key) {
  const std::string& s = lookup(config, key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "' expects true/false, got '" + s + "'");
}

const std::string& config_string(const ConfigMap& config, const std::string& key) { return lookup(config, key); }

}  // namespace rtolab
