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

#include "support/ref_classad.hpp"
#include "vogrid/errors.hpp"
#include "vogrid/jdl.hpp"
#include "vogrid/util.hpp"

using namespace vogrid;
using namespace vogrid::jdl;

TEST_CASE("parse basic job description") {
  ClassAd ad = parse_classad(
      "[ Executable=\"sim\"; Requirements = member(other.CloseSE,\"SE_CERN\"); ]");
  CHECK(ad.attrs().size() == 2);
  CHECK(ad.has("executable"));  // names are case-insensitive
  CHECK(ad.has("Requirements"));
}

TEST_CASE("parse errors report position") {
  try {
    parse_classad("[ Executable = \"x\"\n  Oops ]");
    FAIL("expected ParseError");
  } catch (const GridError& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_classad("[ A = 1; "), GridError);
  CHECK_THROWS_AS(parse_classad("[ A = 1; A = 2; ]"), GridError);
}

TEST_CASE("comments and keyword case") {
  ClassAd ad = parse_classad("[ # a comment\n A = TRUE; B = Undefined; ]");
  CHECK(eval(*ad.find("A"), ad, ad).is_true());
  CHECK(eval(*ad.find("B"), ad, ad).is_undefined());
}

TEST_CASE("eval three-valued logic and undefined propagation") {
  ClassAd job = parse_classad("[ X = 1; Requirements = other.FreeSlots > 0; ]");
  ClassAd ce = parse_classad("[ FreeSlots = 3; ]");
  CHECK(eval(*job.find("Requirements"), job, ce).is_true());

  ClassAd empty;
  CHECK(eval(*job.find("Requirements"), job, empty).is_undefined());

  ExprPtr e = parse_expr("undefined && false");
  CHECK(eval(*e, empty, empty).kind == Value::Kind::Bool);
  CHECK_FALSE(eval(*e, empty, empty).b);
  e = parse_expr("undefined || true");
  CHECK(eval(*e, empty, empty).is_true());
  e = parse_expr("undefined || false");
  CHECK(eval(*e, empty, empty).is_undefined());
  e = parse_expr("1 + undefined");
  CHECK(eval(*e, empty, empty).is_undefined());
  e = parse_expr("\"a\" < 1");
  CHECK(eval(*e, empty, empty).is_undefined());
}

TEST_CASE("cyclic references collapse to undefined") {
  ClassAd ad = parse_classad("[ A = B; B = A; ]");
  CHECK(eval(*ad.find("A"), ad, ad).is_undefined());
}

TEST_CASE("scope flipping through other") {
  // CE.Local refers to the CE's own attribute; job references it via other.
  ClassAd job = parse_classad("[ Requirements = other.Local == 7; ]");
  ClassAd ce = parse_classad("[ Base = 7; Local = Base; ]");
  CHECK(eval(*job.find("Requirements"), job, ce).is_true());
}

TEST_CASE("matches requires both directions") {
  ClassAd job = parse_classad(
      "[ Executable=\"sim\"; Packages={\"AliRoot::3.05\"};"
      "  Requirements = member(other.InstalledPackages,\"AliRoot::3.05\"); ]");
  ClassAd ce = make_resource_ad("CE_CERN", "CERN", "i686-linux", 3, 4, {"AliRoot::3.05"},
                                {"SE_CERN"}, "tier1");
  CHECK(matches(job, ce));

  ClassAd bare = make_resource_ad("CE_X", "X", "i686-linux", 1, 1, {}, {}, "");
  CHECK_FALSE(matches(job, bare));

  // vacuous requirements match anything
  ClassAd trivial = with_default_requirements(parse_classad("[ Executable=\"x\"; ]"));
  CHECK(matches(trivial, ce));

  // resource side can refuse too
  ClassAd picky = ce;
  picky.set("Requirements", parse_expr("other.Owner == \"alice\""));
  CHECK_FALSE(matches(trivial, picky));
  ClassAd owned = trivial;
  owned.set("Owner", lit(Value::str("alice")));
  CHECK(matches(owned, picky));
}

TEST_CASE("rank defaults and undefined collapse") {
  ClassAd ce = make_resource_ad("CE", "S", "p", 5, 8, {}, {}, "");
  ClassAd job = parse_classad("[ Executable = \"x\"; ]");
  CHECK(rank(job, ce) == 0.0);
  job.set("Rank", parse_expr("other.FreeSlots"));
  CHECK(rank(job, ce) == 5.0);
  job.set("Rank", parse_expr("other.NoSuchThing"));
  CHECK(rank(job, ce) == 0.0);
}

// ---------------------------------------------------------------------------
// Generators for the property tests
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kAttrPool = {"Alpha", "Beta", "Gamma", "Delta", "FreeSlots",
                                            "Name", "Tags"};
const std::vector<std::string> kStrPool = {"a", "b", "SE_CERN", "AliRoot::3.05", "x y"};

ExprPtr random_expr(Rng& rng, int depth) {
  double roll = rng.real();
  if (depth <= 0 || roll < 0.35) {  // literal
    switch (rng.below(5)) {
      case 0: return lit(Value::integer(static_cast<std::int64_t>(rng.below(8))));
      case 1: return lit(Value::real(static_cast<double>(rng.below(64)) / 4.0));
      case 2: return lit(Value::str(rng.pick(kStrPool)));
      case 3: return lit(Value::boolean(rng.chance(0.5)));
      default: return lit(Value::undefined());
    }
  }
  if (roll < 0.50) {
    Scope sc = rng.chance(0.5) ? Scope::Self : Scope::Other;
    return ref(sc, rng.pick(kAttrPool), rng.chance(0.7));
  }
  if (roll < 0.60) return unary(rng.chance(0.5) ? UnOp::Not : UnOp::Neg, random_expr(rng, depth - 1));
  if (roll < 0.70) {
    std::vector<ExprPtr> items;
    std::size_t n = rng.below(4);
    for (std::size_t i = 0; i < n; ++i) items.push_back(random_expr(rng, depth - 1));
    return list_expr(std::move(items));
  }
  if (roll < 0.78)
    return member_expr(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
  static const BinOp ops[] = {BinOp::Eq,  BinOp::Ne,  BinOp::Lt,  BinOp::Le,
                              BinOp::Gt,  BinOp::Ge,  BinOp::And, BinOp::Or,
                              BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
  BinOp op = ops[rng.below(12)];
  return binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
}

ClassAd random_ad(Rng& rng) {
  ClassAd ad;
  std::size_t n = 1 + rng.below(kAttrPool.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = kAttrPool[i];
    ad.set(name, random_expr(rng, 3));
  }
  return ad;
}

}  // namespace

TEST_CASE("property: parse(print(ad)) is the identity on 1000 random ads") {
  Rng rng(0xadc0ffee);
  for (int i = 0; i < 1000; ++i) {
    ClassAd ad = random_ad(rng);
    std::string text = print(ad);
    ClassAd back = parse_classad(text);
    if (!equal(ad, back)) {
      CAPTURE(text);
      REQUIRE(equal(ad, back));
    }
    // printing is canonical: a second round-trip is byte-stable
    CHECK(print(back) == text);
  }
}

TEST_CASE("property: evaluator agrees with the naive reference on random expressions") {
  Rng rng(0x5eed);
  for (int i = 0; i < 4000; ++i) {
    ClassAd self = random_ad(rng);
    ClassAd other = random_ad(rng);
    ExprPtr e = random_expr(rng, 4);
    Value got = eval(*e, self, other);
    refeval::RVal want = refeval::ref_eval(*e, refeval::Frame{&self, &other}, 0);
    bool same = refeval::RVal_equal(refeval::to_rval(got), want);
    if (!same) {
      CAPTURE(print_expr(*e));
      CAPTURE(print(self));
      CAPTURE(print(other));
      REQUIRE(same);
    }
  }
}

TEST_CASE("property: matches equals double-evaluation oracle") {
  Rng rng(0x6a0b);
  for (int i = 0; i < 2000; ++i) {
    ClassAd a = random_ad(rng);
    ClassAd b = random_ad(rng);
    if (rng.chance(0.7)) a.set("Requirements", random_expr(rng, 3));
    if (rng.chance(0.7)) b.set("Requirements", random_expr(rng, 3));
    CHECK(matches(a, b) == refeval::ref_matches(a, b));
  }
}

TEST_CASE("property: positive member clauses are monotone in InstalledPackages") {
  Rng rng(0x90a7);
  for (int i = 0; i < 500; ++i) {
    // requirements made only of conjunctions of member(other.InstalledPackages, pkg)
    std::vector<std::string> pool = {"A::1", "B::2", "C::3", "D::4"};
    std::vector<std::string> installed;
    for (const auto& p : pool)
      if (rng.chance(0.5)) installed.push_back(p);

    ExprPtr req;
    int clauses = 1 + static_cast<int>(rng.below(3));
    for (int c = 0; c < clauses; ++c) {
      ExprPtr clause = member_expr(ref(Scope::Other, "InstalledPackages", true),
                                   lit(Value::str(pool[rng.below(pool.size())])));
      req = req ? binary(BinOp::And, req, clause) : clause;
    }
    ClassAd job;
    job.set("Executable", lit(Value::str("x")));
    job.set("Requirements", req);

    ClassAd ce = make_resource_ad("CE", "S", "p", 1, 1, installed, {}, "");
    bool before = matches(job, ce);
    // add one more package: a true match must stay true
    std::vector<std::string> bigger = installed;
    bigger.push_back("E::5");
    ClassAd ce2 = make_resource_ad("CE", "S", "p", 1, 1, bigger, {}, "");
    bool after = matches(job, ce2);
    if (before) CHECK(after);
  }
}

TEST_CASE("job and resource ad validation") {
  CHECK_THROWS_AS(validate_job_ad(parse_classad("[ Arguments = {\"x\"}; ]")), GridError);
  CHECK_NOTHROW(validate_job_ad(parse_classad("[ Executable = \"sim\"; ]")));
  CHECK_THROWS_AS(
      validate_resource_ad(parse_classad("[ Name=\"CE\"; FreeSlots=5; MaxSlots=2; ]")),
      GridError);
  CHECK_NOTHROW(validate_resource_ad(parse_classad("[ Name=\"CE\"; FreeSlots=2; MaxSlots=2; ]")));
}
