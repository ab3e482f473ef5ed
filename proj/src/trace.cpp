#include "sisdmc/trace.hpp"

#include <json.hpp>
#include <sstream>

namespace sisdmc {

namespace {

using nlohmann::ordered_json;

// Does the instruction at `t` read or write variable `var` through the L1?
bool touches_var(const Program& p, const Transition& t, int var) {
  if (t.kind != Transition::Kind::Instr) return false;
  const Statement& s = p.procs[t.proc].stmts[t.arg].stmt;
  return (s.kind == StmtKind::Write || s.kind == StmtKind::Read) && s.var_index == var;
}

ordered_json config_json(const Machine& m, std::span<const Word> c) {
  const Program& p = m.program();
  ordered_json llc = ordered_json::object();
  for (size_t v = 0; v < p.vars.size(); ++v) llc[p.vars[v].name] = m.llc_of(c, (int)v);
  ordered_json procs = ordered_json::array();
  for (size_t pi = 0; pi < p.procs.size(); ++pi) {
    ordered_json pj;
    pj["pid"] = p.procs[pi].name;
    auto lab = m.label_of(c, (int)pi);
    pj["pc"] = lab ? ordered_json(*lab) : ordered_json("end");
    ordered_json regs = ordered_json::object();
    for (size_t r = 0; r < p.procs[pi].registers.size(); ++r)
      regs[p.procs[pi].registers[r]] = m.reg_of(c, (int)pi, (int)r);
    pj["regs"] = std::move(regs);
    ordered_json l1 = ordered_json::object();
    for (size_t v = 0; v < p.vars.size(); ++v) {
      L1Status st = m.l1_status(c, (int)pi, (int)v);
      if (st == L1Status::Invalid) continue;
      l1[p.vars[v].name] = {{"status", st == L1Status::Clean ? "clean" : "dirty"},
                            {"value", m.l1_value(c, (int)pi, (int)v)}};
    }
    pj["l1"] = std::move(l1);
    procs.push_back(std::move(pj));
  }
  return ordered_json{{"llc", std::move(llc)}, {"procs", std::move(procs)}};
}

}  // namespace

std::string format_run(const Machine& m, const WitnessRun& run, bool with_configs) {
  std::ostringstream os;
  const auto& steps = run.steps;
  if (with_configs) os << "initial: " << m.format(run.initial) << '\n';
  for (size_t i = 0; i < steps.size(); ++i) {
    const Transition& t = steps[i].first;
    std::string text;
    size_t config_at = i;
    if (t.kind == Transition::Kind::Fetch && i + 1 < steps.size() &&
        steps[i + 1].first.proc == t.proc &&
        touches_var(m.program(), steps[i + 1].first, t.arg)) {
      text = m.format(steps[i + 1].first) + "*";
      config_at = ++i;
    } else if (t.kind == Transition::Kind::WrLlc && i + 1 < steps.size() &&
               steps[i + 1].first.kind == Transition::Kind::Evict &&
               steps[i + 1].first.proc == t.proc && steps[i + 1].first.arg == t.arg) {
      text = "evict*" + m.format(steps[i + 1].first).substr(5);  // reuse "(p,x)"
      config_at = ++i;
    } else {
      text = m.format(t);
    }
    os << text;
    if (with_configs) os << "  ->  " << m.format(steps[config_at].second);
    os << '\n';
  }
  return os.str();
}

std::string config_to_json(const Machine& m, std::span<const Word> c, int indent) {
  return config_json(m, c).dump(indent);
}

std::string run_to_json(const Machine& m, const WitnessRun& run, int indent) {
  ordered_json steps = ordered_json::array();
  for (const auto& [t, c] : run.steps)
    steps.push_back(ordered_json{{"t", m.format(t)}, {"c", config_json(m, c)}});
  ordered_json j{{"initial", config_json(m, run.initial)}, {"steps", std::move(steps)}};
  return j.dump(indent);
}

}  // namespace sisdmc
