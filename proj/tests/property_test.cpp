#include "sisdmc/property.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace sisdmc;
using Kind = AtomicPred::Kind;

TEST_CASE("a property file is a disjunction of conjunction blocks") {
  SafetyProperty sp = testutil::corpus_property("running.prop");
  REQUIRE(sp.bad.size() == 1);
  const Conjunction& conj = sp.bad[0];
  REQUIRE(conj.size() == 3);
  CHECK(conj[0] == AtomicPred{Kind::At, "P1", std::nullopt, "", "", 0});
  CHECK(conj[1] == AtomicPred{Kind::RegEq, "P1", std::nullopt, "$r2", "", 1});
  CHECK(conj[2] == AtomicPred{Kind::RegEq, "P1", std::nullopt, "$r3", "", 0});
}

TEST_CASE("atoms: control location, register contents, LLC contents") {
  SafetyProperty sp = parse_property(
      "# where P0 got stuck with x already published\n"
      "bad { P0 at L2; llc.x = 1 }\n"
      "bad { P1 at end }\n");
  REQUIRE(sp.bad.size() == 2);
  CHECK(sp.bad[0][0] == AtomicPred{Kind::At, "P0", "L2", "", "", 0});
  CHECK(sp.bad[0][1] == AtomicPred{Kind::LlcEq, "", std::nullopt, "", "x", 1});
  CHECK(sp.bad[1] == Conjunction{AtomicPred{Kind::At, "P1", std::nullopt, "", "", 0}});
}

TEST_CASE("semicolons before '}' and line breaks are cosmetic") {
  SafetyProperty reference = parse_property("bad { llc.x = 1; P0 at end }");
  CHECK(parse_property("bad { llc.x = 1; P0 at end; }") == reference);
  CHECK(parse_property("bad {\n  llc.x = 1;\n  P0 at end\n}") == reference);
  CHECK(parse_property("") == SafetyProperty{});
}

TEST_CASE("dotted labels refer to inserted fences") {
  SafetyProperty sp = parse_property("bad { P0 at L1.f1 }");
  CHECK(sp.bad[0][0].label == "L1.f1");

  Program sb = testutil::corpus_program("sb.sisd");
  CHECK_THROWS_AS(validate_property(sp, sb), ParseError);
  Program fenced = insert_fences(sb, {{"L1", FenceKind::SSFence}});
  CHECK_NOTHROW(validate_property(sp, fenced));
}

TEST_CASE("properties round-trip through the pretty-printer") {
  for (const char* name : {"running.prop", "running_phiprime.prop", "sb.prop", "mp.prop",
                           "readseq.prop", "wrc.prop", "sisdeg.prop", "lb.prop", "isa2.prop",
                           "iriw.prop"}) {
    CAPTURE(name);
    SafetyProperty sp = testutil::corpus_property(name);
    CHECK(parse_property(pretty_print(sp)) == sp);
  }
}

TEST_CASE("parse errors carry a position") {
  auto capture = [](std::string_view text) -> ParseError {
    try {
      parse_property(text);
    } catch (const ParseError& e) {
      return e;
    }
    FAIL("expected a parse error");
    return ParseError("", 0, 0);
  };

  CHECK(capture("good { llc.x = 1 }").line == 1);
  CHECK(capture("bad llc.x = 1 }").col > 1);
  CHECK(capture("bad { llc.x 1 }").line == 1);
  CHECK(capture("bad { P0 near L1 }").line == 1);
  CHECK(capture("bad { P0.$r1 = }").line == 1);
  CHECK(capture("bad {\n  P0 near L1\n}").line == 2);
}

TEST_CASE("validation rejects dangling references") {
  Program sb = testutil::corpus_program("sb.sisd");
  auto reject = [&](std::string_view text) {
    CAPTURE(text);
    CHECK_THROWS_AS(validate_property(parse_property(text), sb), ParseError);
  };
  reject("bad { P9 at end }");
  reject("bad { P0.$nope = 1 }");
  reject("bad { llc.q = 0 }");
  reject("bad { P0 at L99 }");
  reject("bad { P0 at L3 }");      // L3 belongs to P1
  reject("bad { P0.$r1 = 7 }");    // outside the domain {0,1}
  reject("bad { llc.x = 2 }");
  CHECK_NOTHROW(validate_property(parse_property("bad { P0 at L1; llc.x = 1 }"), sb));
}

TEST_CASE("evaluation: conjunction within a block, disjunction across blocks") {
  Program sb = testutil::corpus_program("sb.sisd");
  Machine m(sb, MemModel::SiSd);
  Config init = m.initial_configurations().at(0);

  CHECK(eval_property(parse_property("bad { P0 at L1 }"), m, init));
  CHECK(!eval_property(parse_property("bad { P0 at end }"), m, init));
  CHECK(!eval_property(parse_property("bad { P0 at L1; llc.x = 1 }"), m, init));
  CHECK(eval_property(parse_property("bad { llc.x = 1 } bad { P0 at L1 }"), m, init));
  CHECK(!eval_property(parse_property(""), m, init));
  CHECK(eval_property(parse_property("bad { }"), m, init));  // empty conjunction: always bad
}
