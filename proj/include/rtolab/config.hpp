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

// Flat run configuration: `key = value` lines with dotted keys, `#` comments.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtolab {

using ConfigMap = std::map<std::string, std::string>;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses config text. Keys are not checked here.
ConfigMap parse_config_text(std::string_view text);
ConfigMap load_config_file(const std::string& path);

/// Sorted `key = value` lines; parse_config_text(format_config(m)) == m.
std::string format_config(const ConfigMap& config);

/// Applies "key=value". Throws ConfigError when the key is not already
/// present in `config` (which always holds the full key set).
void apply_override(ConfigMap& config, std::string_view assignment);
/// Merges `overrides` into `config` with the same unknown-key rule.
void merge_config(ConfigMap& config, const ConfigMap& overrides);

double config_double(const ConfigMap& config, const std::string& key);
long long config_int(const ConfigMap& config, const std::string& key);
bool config_bool(const ConfigMap& config, const std::string& key);
const std::string& config_string(const ConfigMap& config, const std::string& key);

}  // namespace rtolab
