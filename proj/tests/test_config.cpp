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

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "rtolab/config.hpp"

using namespace rtolab;

TEST_CASE("parse config text") {
  const auto c = parse_config_text(
      "# comment line\n"
      "scenario = fig3\n"
      "algorithm.layer3.k=4   # trailing comment\n"
      "\n"
      "  loss.p   =  0.25  \r\n"
      "empty =\n");
  CHECK(c.size() == 4);
  CHECK(c.at("scenario") == "fig3");
  CHECK(c.at("algorithm.layer3.k") == "4");
  CHECK(c.at("loss.p") == "0.25");
  CHECK(c.at("empty").empty());

  CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = value\n"), ConfigError);
}

TEST_CASE("format round trip") {
  const ConfigMap c{{"b.x", "1"}, {"a", "two words"}, {"c", ""}};
  const std::string text = format_config(c);
  CHECK(text == "a = two words\nb.x = 1\nc = \n");
  CHECK(parse_config_text(text) == c);
}

TEST_CASE("overrides reject unknown keys") {
  ConfigMap c{{"seed", "1"}, {"loss.p", "0"}};
  apply_override(c, "loss.p=0.3");
  CHECK(c.at("loss.p") == "0.3");
  CHECK_THROWS_AS(apply_override(c, "loss.q=0.3"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "seed"), ConfigError);

  merge_config(c, {{"seed", "9"}});
  CHECK(c.at("seed") == "9");
  CHECK_THROWS_AS(merge_config(c, {{"sed", "9"}}), ConfigError);
}

TEST_CASE("typed accessors") {
  const ConfigMap c{{"d", "2.5"}, {"i", "-3"}, {"t", "true"}, {"f", "no"}, {"bad", "x1"}, {"s", "hi"}};
  CHECK(config_double(c, "d") == 2.5);
  CHECK(config_int(c, "i") == -3);
  CHECK(config_bool(c, "t"));
  CHECK_FALSE(config_bool(c, "f"));
  CHECK(config_string(c, "s") == "hi");
  CHECK_THROWS_AS(config_double(c, "bad"), ConfigError);
  CHECK_THROWS_AS(config_int(c, "d"), ConfigError);
  CHECK_THROWS_AS(config_bool(c, "s"), ConfigError);
  CHECK_THROWS_AS(config_double(c, "missing"), ConfigError);
}

TEST_CASE("config files") {
  const std::string path = "rtolab_test_config.txt";
  {
    std::ofstream out(path);
    out << "scenario = fig6_ignore\nseed = 7\n";
  }
  const auto c = load_config_file(path);
  CHECK(c.at("seed") == "7");
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config_file("/nonexistent/dir/config.txt"), std::ios_base::failure);
}
