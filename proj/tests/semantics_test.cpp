#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "sisdmc/reachability.hpp"
#include "sisdmc/semantics.hpp"
#include "sisdmc/trace.hpp"

using namespace sisdmc;
using testutil::corpus_program;
using testutil::corpus_property;
using testutil::replay;
using testutil::Step;

namespace {

Program tiny(const std::string& body, const std::string& regs = "",
             const std::string& data = "data x = 0") {
  return parse_program(data + "\nprocess P0 registers " + regs + "\nbegin\n" + body +
                       "\nend\n");
}

}  // namespace

TEST_CASE("slot layout and the initial configuration") {
  Machine m(corpus_program("running.sisd"), MemModel::SiSd);
  // P0: pc + 1 register + 3 cache slots; P1: pc + 3 registers + 3 cache
  // slots; 3 LLC slots
  CHECK(m.stride() == 5 + 7 + 3);

  auto inits = m.initial_configurations();
  REQUIRE(inits.size() == 1);
  const Config& c0 = inits[0];
  CHECK(m.label_of(c0, 0) == "L1");
  CHECK(m.label_of(c0, 1) == "L4");
  CHECK(m.reg_of(c0, 0, 0) == 0);
  for (int v = 0; v < 3; ++v) {
    CHECK(m.llc_of(c0, v) == 0);
    CHECK(m.l1_status(c0, 0, v) == L1Status::Invalid);
    CHECK(m.l1_status(c0, 1, v) == L1Status::Invalid);
  }
}

TEST_CASE("star initializers enumerate every assignment in order") {
  Program p = parse_program(
      "domain 3;\ndata x = * y = 0\nprocess P0 registers\nbegin\nL1: x := 1;\nend\n");
  Machine m(p, MemModel::SiSd);
  auto inits = m.initial_configurations();
  REQUIRE(inits.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(m.llc_of(inits[i], 0) == i);

  Program q = parse_program(
      "data x = * y = *\nprocess P0 registers\nbegin\nL1: x := 1;\nend\n");
  Machine mq(q, MemModel::SiSd);
  auto qi = mq.initial_configurations();
  REQUIRE(qi.size() == 4);
  // first-declared variable is the most significant digit
  int want[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int i = 0; i < 4; ++i) {
    CHECK(mq.llc_of(qi[i], 0) == want[i][0]);
    CHECK(mq.llc_of(qi[i], 1) == want[i][1]);
  }
}

TEST_CASE("from the start only fetches are enabled, in process-then-variable order") {
  Machine m(corpus_program("running.sisd"), MemModel::SiSd);
  Config c0 = m.initial_configurations()[0];
  auto ts = m.enabled_transitions(c0);
  REQUIRE(ts.size() == 6);
  const char* want[] = {"fetch(P0,x)", "fetch(P0,y)", "fetch(P0,z)",
                        "fetch(P1,x)", "fetch(P1,y)", "fetch(P1,z)"};
  for (int i = 0; i < 6; ++i) CHECK(m.format(ts[i]) == want[i]);

  // the writes at L1/L4 need a valid cache entry first
  CHECK_FALSE(m.is_enabled(c0, {Transition::Kind::Instr, 0, 0}));
  CHECK_THROWS_AS(m.apply_transition(c0, {Transition::Kind::Instr, 0, 0}),
                  std::invalid_argument);
}

// The two-writer example admits a run in which P1 observes the second write
// but then reads a stale cached copy of x. Replaying it step by step pins
// down fetch/write-back/evict effects and the read-from-cache rule.
TEST_CASE("stale-read run of the two-writer example") {
  Machine m(corpus_program("running.sisd"), MemModel::SiSd);
  WitnessRun run = replay(m, {
      {"fetch", "P1", "z"}, {"L4"},
      {"fetch", "P0", "x"}, {"L1"},
      {"fetch", "P0", "y"}, {"L2"},
      {"fetch", "P1", "x"}, {"L5"},
      {"wrllc", "P0", "x"}, {"evict", "P0", "x"},
      {"wrllc", "P0", "y"}, {"evict", "P0", "y"},
      {"fetch", "P1", "y"}, {"L6"},
      {"L7"},
  });

  const int x = 0, y = 1, z = 2;

  // after both processes buffered their writes
  const Config& c1 = run.steps[5].second;
  CHECK(m.label_of(c1, 0) == "L3");
  CHECK(m.label_of(c1, 1) == "L5");
  CHECK(m.l1_status(c1, 0, x) == L1Status::Dirty);
  CHECK(m.l1_value(c1, 0, x) == 1);
  CHECK(m.l1_status(c1, 0, y) == L1Status::Dirty);
  CHECK(m.l1_status(c1, 1, z) == L1Status::Dirty);
  CHECK(m.llc_of(c1, x) == 0);
  CHECK(m.llc_of(c1, y) == 0);
  CHECK(m.llc_of(c1, z) == 0);

  // after P1 cached x=0 and P0 wrote back and dropped both variables
  const Config& c2 = run.steps[11].second;
  CHECK(m.reg_of(c2, 1, 0) == 0);  // $r1 read the stale 0
  CHECK(m.l1_status(c2, 0, x) == L1Status::Invalid);
  CHECK(m.l1_status(c2, 0, y) == L1Status::Invalid);
  CHECK(m.l1_status(c2, 1, x) == L1Status::Clean);
  CHECK(m.l1_value(c2, 1, x) == 0);
  CHECK(m.llc_of(c2, x) == 1);
  CHECK(m.llc_of(c2, y) == 1);

  // final configuration: P1 done, saw y=1 but still the old x
  const Config& c3 = run.steps.back().second;
  CHECK(m.at_end(c3, 1));
  CHECK_FALSE(m.label_of(c3, 1).has_value());
  CHECK(m.reg_of(c3, 1, 1) == 1);  // $r2
  CHECK(m.reg_of(c3, 1, 2) == 0);  // $r3

  SafetyProperty phi = corpus_property("running.prop");
  CHECK(eval_property(phi, m, c3));
  CHECK_FALSE(eval_property(phi, m, c2));
  CHECK_FALSE(verify_witness(m, phi, run).has_value());

  // the folded rendering matches the two-writer run notation
  CHECK(format_run(m, run) ==
        "L4*\nL1*\nL2*\nL5*\nevict*(P0,x)\nevict*(P0,y)\nL6*\nL7\n");
}

TEST_CASE("ssfence waits for dirty entries only") {
  Machine m(tiny("L1: x := 1;\nL2: ssfence;"), MemModel::SiSd);
  Config c = m.initial_configurations()[0];
  c = m.apply_transition(c, {Transition::Kind::Fetch, 0, 0});
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 0});
  Transition ss{Transition::Kind::Instr, 0, 1};
  CHECK_FALSE(m.is_enabled(c, ss));  // x dirty
  c = m.apply_transition(c, {Transition::Kind::WrLlc, 0, 0});
  CHECK(m.is_enabled(c, ss));  // clean copies don't block it
  c = m.apply_transition(c, ss);
  CHECK(m.at_end(c, 0));
}

TEST_CASE("llfence waits for clean entries only") {
  Machine m(tiny("L1: $r := x;\nL2: llfence;", "$r"), MemModel::SiSd);
  Config c = m.initial_configurations()[0];
  c = m.apply_transition(c, {Transition::Kind::Fetch, 0, 0});
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 0});
  Transition ll{Transition::Kind::Instr, 0, 1};
  CHECK_FALSE(m.is_enabled(c, ll));  // x clean
  c = m.apply_transition(c, {Transition::Kind::Evict, 0, 0});
  CHECK(m.is_enabled(c, ll));

  Machine md(tiny("L1: x := 1;\nL2: llfence;"), MemModel::SiSd);
  Config cd = md.initial_configurations()[0];
  cd = md.apply_transition(cd, {Transition::Kind::Fetch, 0, 0});
  cd = md.apply_transition(cd, {Transition::Kind::Instr, 0, 0});
  CHECK(md.is_enabled(cd, {Transition::Kind::Instr, 0, 1}));  // dirty doesn't block it
}

TEST_CASE("full fence waits for an empty cache") {
  Machine m(tiny("L1: x := 1;\nL2: fence;"), MemModel::SiSd);
  Config c = m.initial_configurations()[0];
  c = m.apply_transition(c, {Transition::Kind::Fetch, 0, 0});
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 0});
  Transition f{Transition::Kind::Instr, 0, 1};
  CHECK_FALSE(m.is_enabled(c, f));  // dirty
  c = m.apply_transition(c, {Transition::Kind::WrLlc, 0, 0});
  CHECK_FALSE(m.is_enabled(c, f));  // still clean
  c = m.apply_transition(c, {Transition::Kind::Evict, 0, 0});
  CHECK(m.is_enabled(c, f));
}

TEST_CASE("synchronized writes bypass the cache and demand it empty of the variable") {
  Machine m(tiny("L1: syncwr : x := 1;"), MemModel::SiSd);
  Config c0 = m.initial_configurations()[0];
  Transition sw{Transition::Kind::Instr, 0, 0};
  CHECK(m.is_enabled(c0, sw));
  Config c1 = m.apply_transition(c0, sw);
  CHECK(m.llc_of(c1, 0) == 1);
  CHECK(m.l1_status(c1, 0, 0) == L1Status::Invalid);

  Config cf = m.apply_transition(c0, {Transition::Kind::Fetch, 0, 0});
  CHECK_FALSE(m.is_enabled(cf, sw));  // a local copy blocks it
}

TEST_CASE("cas acts on the LLC and blocks until the expected value shows up") {
  Machine m(tiny("L1: cas(x, 0, 1);"), MemModel::SiSd);
  Config c0 = m.initial_configurations()[0];
  Transition cas{Transition::Kind::Instr, 0, 0};
  CHECK(m.is_enabled(c0, cas));
  Config c1 = m.apply_transition(c0, cas);
  CHECK(m.llc_of(c1, 0) == 1);

  Machine mw(tiny("L1: cas(x, 1, 0);"), MemModel::SiSd);
  Config w0 = mw.initial_configurations()[0];
  CHECK_FALSE(mw.is_enabled(w0, cas));  // llc holds 0, not 1
  auto ts = mw.enabled_transitions(w0);
  REQUIRE(ts.size() == 1);
  CHECK(mw.format(ts[0]) == "fetch(P0,x)");

  Config cf = m.apply_transition(c0, {Transition::Kind::Fetch, 0, 0});
  CHECK_FALSE(m.is_enabled(cf, cas));  // cached copy blocks it too
}

TEST_CASE("under sequential consistency accesses hit the LLC directly") {
  Machine m(corpus_program("running.sisd"), MemModel::Sc);
  Config c = m.initial_configurations()[0];
  auto ts = m.enabled_transitions(c);
  REQUIRE(ts.size() == 2);  // both writes; no system events exist
  CHECK(m.format(ts[0]) == "L1");
  CHECK(m.format(ts[1]) == "L4");

  c = m.apply_transition(c, ts[0]);  // L1: x := 1
  CHECK(m.llc_of(c, 0) == 1);
  CHECK(m.l1_status(c, 0, 0) == L1Status::Invalid);

  c = m.apply_transition(c, {Transition::Kind::Instr, 1, 0});  // L4: z := 1
  c = m.apply_transition(c, {Transition::Kind::Instr, 1, 1});  // L5: $r1 := x
  CHECK(m.reg_of(c, 1, 0) == 1);  // reads see the store immediately
}

TEST_CASE("under sequential consistency fences are no-ops") {
  Program p = corpus_program("sisdeg.sisd");
  Machine m(p, MemModel::Sc);
  Config c = m.initial_configurations()[0];
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 0});  // L1
  CHECK(m.is_enabled(c, {Transition::Kind::Instr, 0, 1}));
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 1});  // L2: fence
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 2});  // L3
  CHECK(m.at_end(c, 0));
  CHECK(m.llc_of(c, 1) == 1);
}

TEST_CASE("under sequential consistency cas still guards on the expected value") {
  Machine m(tiny("L1: cas(x, 1, 0);"), MemModel::Sc);
  Config c0 = m.initial_configurations()[0];
  CHECK(m.enabled_transitions(c0).empty());  // blocked forever, no events
  Machine ok(tiny("L1: cas(x, 0, 1);"), MemModel::Sc);
  CHECK(ok.enabled_transitions(ok.initial_configurations()[0]).size() == 1);
}

namespace {

std::set<Config> reachable_set(const Machine& m) {
  std::set<Config> out;
  bool complete = for_each_reachable(m, 1'000'000, [&](std::span<const Word> c) {
    out.emplace(c.begin(), c.end());
  });
  REQUIRE(complete);
  return out;
}

}  // namespace

TEST_CASE("the store-ordered model equals running the syncwr rewrite of the program") {
  for (const char* name : {"sb.sisd", "mp.sisd"}) {
    CAPTURE(name);
    Program p = corpus_program(name);
    Program rewritten = to_si_view(p);
    CHECK(reachable_set(Machine(p, MemModel::Si)) ==
          reachable_set(Machine(rewritten, MemModel::SiSd)));
  }
}

TEST_CASE("the syncwr rewrite touches only plain writes and is idempotent") {
  Program p = corpus_program("sb.sisd");
  Program q = to_si_view(p);
  CHECK(q.procs[0].stmts[0].stmt.kind == StmtKind::SyncWr);
  CHECK(q.procs[0].stmts[1].stmt.kind == StmtKind::Read);
  CHECK(to_si_view(q) == q);
}

TEST_CASE("transitions are deterministic and only touch the acting process and the LLC") {
  Program p = corpus_program("sb.sisd");
  Machine m(p, MemModel::SiSd);
  int nvars = (int)p.vars.size();

  std::vector<Config> frontier = m.initial_configurations();
  std::set<Config> seen(frontier.begin(), frontier.end());
  for (int depth = 0; depth < 4; ++depth) {
    std::vector<Config> next;
    for (const Config& c : frontier) {
      for (Transition t : m.enabled_transitions(c)) {
        Config a = m.apply_transition(c, t);
        Config b = m.apply_transition(c, t);
        CHECK(a == b);

        int lo = m.pc_slot(t.proc);
        int hi = m.l1_slot(t.proc, nvars - 1);
        for (int s = 0; s < m.stride(); ++s) {
          bool own = s >= lo && s <= hi;
          bool llc = s >= m.llc_slot(0) && s <= m.llc_slot(nvars - 1);
          if (!own && !llc) CHECK(a[s] == c[s]);
        }
        if (seen.insert(a).second) next.push_back(std::move(a));
      }
    }
    frontier = std::move(next);
  }
}

TEST_CASE("a finished process issues no instructions but its cache still drains") {
  Machine m(corpus_program("sb.sisd"), MemModel::SiSd);
  Config c = m.initial_configurations()[0];
  c = m.apply_transition(c, {Transition::Kind::Fetch, 0, 0});
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 0});  // L1: x := 1
  c = m.apply_transition(c, {Transition::Kind::Fetch, 0, 1});
  c = m.apply_transition(c, {Transition::Kind::Instr, 0, 1});  // L2: $r1 := y
  CHECK(m.at_end(c, 0));

  for (Transition t : m.enabled_transitions(c))
    CHECK((t.kind != Transition::Kind::Instr || t.proc != 0));
  CHECK(m.is_enabled(c, {Transition::Kind::WrLlc, 0, 0}));  // dirty x
  CHECK(m.is_enabled(c, {Transition::Kind::Evict, 0, 1}));  // clean y
}

TEST_CASE("transition and configuration formatting") {
  Machine m(corpus_program("running.sisd"), MemModel::SiSd);
  CHECK(m.format(Transition{Transition::Kind::Instr, 1, 0}) == "L4");
  CHECK(m.format(Transition{Transition::Kind::Fetch, 1, 2}) == "fetch(P1,z)");
  CHECK(m.format(Transition{Transition::Kind::WrLlc, 0, 0}) == "wrllc(P0,x)");
  CHECK(m.format(Transition{Transition::Kind::Evict, 0, 1}) == "evict(P0,y)");

  Config c0 = m.initial_configurations()[0];
  std::string s = m.format(c0);
  CHECK(s.find("LLC") != std::string::npos);
  CHECK(s.find("P0") != std::string::npos);
}

TEST_CASE("witness JSON lists raw steps with their configurations") {
  Machine m(corpus_program("running.sisd"), MemModel::SiSd);
  WitnessRun run = replay(m, {{"fetch", "P1", "z"}, {"L4"}});
  std::string j = run_to_json(m, run);
  CHECK(j.find("\"initial\"") != std::string::npos);
  CHECK(j.find("\"fetch(P1,z)\"") != std::string::npos);
  CHECK(j.find("\"L4\"") != std::string::npos);
  CHECK(j.find("\"dirty\"") != std::string::npos);  // z sits dirty in P1's cache
}
