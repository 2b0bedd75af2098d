/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include "support/fixtures.hpp"
#include "vogrid/config.hpp"
#include "vogrid/errors.hpp"
#include "vogrid/util.hpp"
#include "vogrid/vo.hpp"

using namespace vogrid;

TEST_CASE("config parse and reprint round-trip") {
  std::string text = R"([scenario]
prod until=1000 name="big run"

[faults main]
f1 at=5 kind=crash target=CE_A
)";
  ConfigDoc doc = ConfigDoc::parse(text);
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.sections[0].kind == "scenario");
  CHECK(doc.sections[1].arg == "main");
  const ConfigEntry* e = doc.find("scenario")->find("prod");
  REQUIRE(e);
  CHECK(e->get_int("until") == 1000);
  CHECK(e->get("name") == "big run");

  ConfigDoc again = ConfigDoc::parse(doc.print());
  CHECK(again.print() == doc.print());
}

TEST_CASE("config errors carry line numbers") {
  CHECK_THROWS_WITH_AS(ConfigDoc::parse("x no_section=1\n"),
                       doctest::Contains("line 1"), GridError);
  try {
    ConfigDoc::parse("[a]\nname k=\"unterminated\n");
    FAIL("expected throw");
  } catch (const GridError& e) {
    CHECK(e.code() == Errc::ParseError);
  }
}

TEST_CASE("vo config loads users, services and packages") {
  VoConfig vo = VoConfig::load(ConfigDoc::parse(fixtures::small_vo_text()));
  REQUIRE(vo.user("alice"));
  CHECK(vo.user("alice")->groups == std::vector<std::string>{"alice", "hep"});
  CHECK(vo.user("root")->roles == std::vector<std::string>{"admin"});
  CHECK(vo.has_se("SE_CERN"));
  CHECK_FALSE(vo.has_se("SE_NOWHERE"));
  REQUIRE(vo.ce("CE_CERN"));
  CHECK(vo.ce("CE_CERN")->max_slots == 4);
  CHECK(vo.ce("CE_CERN")->close_se == std::vector<std::string>{"SE_CERN"});
  REQUIRE(vo.command("aliroot-sim"));
  CHECK(vo.command("aliroot-sim")->validation == ValidationKind::OutputsNonzero);
  CHECK(vo.command("aliroot-sim")->profile.produces[0].second == 2'000'000'000ULL);
  REQUIRE(vo.package("AliRoot", "3.05"));
  CHECK(vo.highest_package("ROOT")->version == "3.05.01");
  CHECK(vo.partition_of_site("CERN") == "tier1");
  CHECK(vo.policies().size() == 2);
}

TEST_CASE("vo config validation rejects dangling references") {
  std::string bad = R"([groups]
g
[roles]
[users]
u groups=missing
)";
  CHECK_THROWS_AS(VoConfig::load(ConfigDoc::parse(bad)), GridError);

  std::string cycle = R"([packages]
A::1 depends=B::1
B::1 depends=A::1
)";
  try {
    VoConfig::load(ConfigDoc::parse(cycle));
    FAIL("expected cycle detection");
  } catch (const GridError& e) {
    CHECK(e.code() == Errc::CycleDetected);
  }
}

TEST_CASE("version comparison is numeric by component") {
  CHECK(compare_versions("3.02.07", "3.05") < 0);
  CHECK(compare_versions("3.05", "3.05") == 0);
  CHECK(compare_versions("3.10", "3.9") > 0);
  CHECK(compare_versions("3.05", "3.05.0") == 0);
}

TEST_CASE("duration parsing is exact") {
  CHECK(parse_seconds("0.1") == 100000);
  CHECK(parse_seconds("3600") == 3600 * kTicksPerSecond);
  CHECK(format_ticks(parse_seconds("12.3")) == "12.300000");
}
