#pragma once

// Shared fixtures: corpus file loading and a replay harness that turns a
// hand-written transition script into a WitnessRun.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sisdmc/lang.hpp"
#include "sisdmc/property.hpp"
#include "sisdmc/reachability.hpp"
#include "sisdmc/semantics.hpp"

namespace testutil {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(SISDMC_CORPUS_DIR) + "/" + name;
}

inline sisdmc::Program corpus_program(const std::string& name) {
  return sisdmc::parse_program(slurp(corpus_path(name)));
}

inline sisdmc::SafetyProperty corpus_property(const std::string& name) {
  return sisdmc::parse_property(slurp(corpus_path(name)));
}

// A step in a replay script, readable at the call site:
//   {"L4"}               instruction at label L4
//   {"fetch", "P1", "z"} system event
struct Step {
  std::string what;
  std::string proc, var;
};

inline sisdmc::Transition resolve_step(const sisdmc::Machine& m, const Step& s) {
  using sisdmc::Transition;
  const sisdmc::Program& p = m.program();
  if (s.proc.empty()) {
    auto ref = p.find_label(s.what);
    if (!ref) throw std::runtime_error("no such label " + s.what);
    return {Transition::Kind::Instr, (uint8_t)ref->proc, (int16_t)ref->stmt};
  }
  Transition::Kind kind;
  if (s.what == "fetch") kind = Transition::Kind::Fetch;
  else if (s.what == "wrllc") kind = Transition::Kind::WrLlc;
  else if (s.what == "evict") kind = Transition::Kind::Evict;
  else throw std::runtime_error("bad step kind " + s.what);
  int proc = p.find_proc(s.proc);
  int var = p.find_var(s.var);
  if (proc < 0 || var < 0) throw std::runtime_error("bad step operand");
  return {kind, (uint8_t)proc, (int16_t)var};
}

// Applies the script from the machine's (unique) initial configuration,
// throwing if any step is disabled.
inline sisdmc::WitnessRun replay(const sisdmc::Machine& m, const std::vector<Step>& script) {
  sisdmc::WitnessRun run;
  auto inits = m.initial_configurations();
  if (inits.size() != 1) throw std::runtime_error("expected one initial configuration");
  run.initial = inits[0];
  sisdmc::Config cur = run.initial;
  for (const Step& s : script) {
    sisdmc::Transition t = resolve_step(m, s);
    cur = m.apply_transition(cur, t);
    run.steps.emplace_back(t, cur);
  }
  return run;
}

}  // namespace testutil
