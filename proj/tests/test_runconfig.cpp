// Copyright (c) 2026 The f2vs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <fstream>
#include <string>

#include "doctest.h"
#include "f2vs/common.hpp"
#include "f2vs/runconfig.hpp"
#include "util.hpp"

using namespace f2vs;

TEST_SUITE("runconfig") {

TEST_CASE("parsing: comments, whitespace, first '=', last wins") {
  const RunConfig c = RunConfig::from_string(
      "# leading comment\n"
      "\n"
      "  stage1.epochs = 200  \n"
      "dcts.n_pairs=5000 # trailing comment\n"
      "model.path = runs/a=b.bin\n"
      "stage1.epochs = 300\n"
      "   \t   \n");
  CHECK(c.has("stage1.epochs"));
  CHECK(c.get_string("stage1.epochs", "") == "300");  // repeated key
  CHECK(c.get_string("dcts.n_pairs", "") == "5000");
  // only the first '=' splits; the rest stays in the value
  CHECK(c.get_string("model.path", "") == "runs/a=b.bin");
  CHECK(!c.has("missing"));
  CHECK(c.get_string("missing", "dflt") == "dflt");
}

TEST_CASE("parse errors name the offending line") {
  CHECK_THROWS_WITH_AS(
      RunConfig::from_string("a=1\njust words\n"),
      "config line 2: expected key=value, got 'just words'", ValidationError);
  CHECK_THROWS_WITH_AS(RunConfig::from_string("a=1\nb=2\n = 3\n"),
                       "config line 3: empty key", ValidationError);
}

TEST_CASE("typed getters parse fully or throw") {
  RunConfig c;
  c.set("lr", "5e-5");
  c.set("neg", "-2.5");
  c.set("epochs", "200");
  c.set("big", "18446744073709551615");
  c.set("flag_t", "true");
  c.set("flag_1", "1");
  c.set("flag_f", "false");
  c.set("flag_0", "0");

  CHECK(c.get_double("lr", 0.0) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(c.get_double("neg", 0.0) == -2.5);
  CHECK(c.get_double("absent", 0.125) == 0.125);
  CHECK(c.get_u64("epochs", 0) == 200);
  CHECK(c.get_u64("big", 0) == UINT64_MAX);
  CHECK(c.get_u64("absent", 7) == 7);
  CHECK(c.get_size("epochs", 0) == std::size_t{200});
  CHECK(c.get_bool("flag_t", false));
  CHECK(c.get_bool("flag_1", false));
  CHECK(!c.get_bool("flag_f", true));
  CHECK(!c.get_bool("flag_0", true));
  CHECK(c.get_bool("absent", true));

  c.set("partial", "0.5abc");
  CHECK_THROWS_WITH_AS(c.get_double("partial", 0.0),
                       "config key 'partial': cannot parse '0.5abc' as a number",
                       ValidationError);
  c.set("huge", "1e999");
  CHECK_THROWS_AS(c.get_double("huge", 0.0), ValidationError);
  c.set("empty", "");
  CHECK_THROWS_AS(c.get_double("empty", 0.0), ValidationError);
  CHECK_THROWS_WITH_AS(
      c.get_u64("empty", 0),
      "config key 'empty': cannot parse '' as a non-negative integer",
      ValidationError);
  c.set("minus", "-3");
  CHECK_THROWS_AS(c.get_u64("minus", 0), ValidationError);
  c.set("overflow", "18446744073709551616");
  CHECK_THROWS_AS(c.get_u64("overflow", 0), ValidationError);
  c.set("yes", "yes");
  CHECK_THROWS_WITH_AS(c.get_bool("yes", false),
                       "config key 'yes': cannot parse 'yes' as a bool "
                       "(true/false/1/0)",
                       ValidationError);
}

TEST_CASE("check_known flags the first unknown key") {
  const RunConfig c = RunConfig::from_string("a=1\nb=2\n");
  c.check_known({"a", "b", "c"});
  CHECK_THROWS_WITH_AS(c.check_known({"a"}), "unknown config key 'b'",
                       ValidationError);
}

TEST_CASE("render is sorted and round-trips") {
  RunConfig c;
  c.set("zeta", "9");
  c.set("alpha", "1");
  c.set("mid.key", "x y");
  CHECK(c.render() == "alpha=1\nmid.key=x y\nzeta=9\n");
  CHECK(c.render() == RunConfig::from_string(c.render()).render());
}

TEST_CASE("from_file reads what from_string would") {
  const std::string dir = testutil::fresh_dir("runconfig");
  const std::string path = dir + "/run.cfg";
  {
    std::ofstream out(path);
    out << "seed = 42\n# note\nlr=1e-3\n";
  }
  const RunConfig c = RunConfig::from_file(path);
  CHECK(c.get_u64("seed", 0) == 42);
  CHECK(c.get_double("lr", 0.0) == 1e-3);
  CHECK_THROWS_AS(RunConfig::from_file(dir + "/absent.cfg"), ValidationError);
}

}  // TEST_SUITE
