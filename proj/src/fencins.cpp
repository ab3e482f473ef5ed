#include "sisdmc/fencins.hpp"

#include <cassert>
#include <chrono>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sisdmc {

int CostModel::of(FenceKind k) const {
  switch (k) {
    case FenceKind::Fence: return fence;
    case FenceKind::SSFence: return ssfence;
    case FenceKind::LLFence: return llfence;
    case FenceKind::SyncWr: return syncwr;
  }
  return 0;
}

long CostModel::total(const std::set<FenceConstraint>& f) const {
  long sum = 0;
  for (const auto& c : f) sum += of(c.kind);
  return sum;
}

bool FenceMenu::allows(FenceKind k) const {
  switch (k) {
    case FenceKind::Fence: return fence;
    case FenceKind::SSFence: return ssfence;
    case FenceKind::LLFence: return llfence;
    case FenceKind::SyncWr: return syncwr;
  }
  return false;
}

const char* to_string(ReorderedPair::Category c) {
  switch (c) {
    case ReorderedPair::Category::WW: return "WW";
    case ReorderedPair::Category::RR: return "RR";
    case ReorderedPair::Category::WR: return "WR";
  }
  return "?";
}

const char* to_string(FencinsStatus s) {
  switch (s) {
    case FencinsStatus::Optimal: return "optimal";
    case FencinsStatus::Uncorrectable: return "uncorrectable";
    case FencinsStatus::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

std::string to_string(const std::set<FenceConstraint>& f) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& c : f) {
    if (!first) os << ", ";
    first = false;
    os << to_string(c);
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Reordering detection

namespace {

struct Access {
  bool is_write;
  std::string label;
  int proc;
  size_t issue;   // step index of the instruction
  size_t point;   // step index where the access took global effect
  bool plain_write;  // a Write statement (as opposed to syncwr/cas)
};

}  // namespace

std::vector<ReorderedPair> detect_reorderings(const Machine& m, const WitnessRun& run) {
  const Program& prog = m.program();
  const size_t n = run.steps.size();
  const int n_procs = (int)prog.procs.size();
  const int n_vars = (int)prog.vars.size();

  // Provenance of each process's valid L1 entry: kNone (no valid copy has
  // been observed yet), kOwn (value stems from the process's own write), or
  // the index of the fetch that installed it.
  constexpr long kNone = -2, kOwn = -1;
  std::vector<std::vector<long>> prov(n_procs, std::vector<long>(n_vars, kNone));
  // Writes whose write-back has not happened yet, as indices into accesses.
  std::vector<std::vector<std::vector<size_t>>> pending(
      n_procs, std::vector<std::vector<size_t>>(n_vars));

  std::vector<Access> accesses;
  for (size_t i = 0; i < n; ++i) {
    const Transition& t = run.steps[i].first;
    int p = t.proc;
    switch (t.kind) {
      case Transition::Kind::Fetch:
        prov[p][t.arg] = (long)i;
        break;
      case Transition::Kind::WrLlc:
        for (size_t a : pending[p][t.arg]) accesses[a].point = i;
        pending[p][t.arg].clear();
        break;
      case Transition::Kind::Evict:
        break;
      case Transition::Kind::Instr: {
        const Statement& s = prog.procs[p].stmts[t.arg].stmt;
        const std::string& label = prog.procs[p].stmts[t.arg].label;
        switch (s.kind) {
          case StmtKind::Write:
            accesses.push_back({true, label, p, i, n, true});
            pending[p][s.var_index].push_back(accesses.size() - 1);
            prov[p][s.var_index] = kOwn;
            break;
          case StmtKind::SyncWr:
          case StmtKind::Cas:
            accesses.push_back({true, label, p, i, i, false});
            break;
          case StmtKind::Read:
            // Reads satisfied by the process's own (dirty or written-back)
            // value have no independent global point and never pair.
            if (prov[p][s.var_index] >= 0)
              accesses.push_back({false, label, p, i, (size_t)prov[p][s.var_index], false});
            break;
          default:
            break;
        }
        break;
      }
    }
  }
  // Writes never committed: visible strictly after everything in the run.
  // (pending entries already carry point = n.)

  std::vector<ReorderedPair> pairs;
  for (size_t a = 0; a < accesses.size(); ++a) {
    for (size_t b = a + 1; b < accesses.size(); ++b) {
      const Access &ea = accesses[a], &eb = accesses[b];
      if (ea.proc != eb.proc || ea.issue >= eb.issue || ea.point <= eb.point) continue;
      ReorderedPair rp;
      rp.proc = ea.proc;
      rp.earlier = ea.label;
      rp.later = eb.label;
      rp.earlier_index = ea.issue;
      rp.later_index = eb.issue;
      if (ea.is_write && eb.is_write)
        rp.category = ReorderedPair::Category::WW;
      else if (!ea.is_write && !eb.is_write)
        rp.category = ReorderedPair::Category::RR;
      else if (ea.is_write && !eb.is_write)
        rp.category = ReorderedPair::Category::WR;
      else
        continue;  // a write's point can never precede an earlier read's fetch
      for (size_t i = ea.issue; i < eb.issue; ++i) {
        const Transition& t = run.steps[i].first;
        if (t.kind != Transition::Kind::Instr || t.proc != ea.proc) continue;
        const std::string& lab = prog.procs[t.proc].stmts[t.arg].label;
        bool dup = false;
        for (const auto& seen : rp.between) dup |= (seen == lab);
        if (!dup) rp.between.push_back(lab);
      }
      pairs.push_back(std::move(rp));
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Witness analysis

namespace {

StmtKind stmt_kind_of(FenceKind k) {
  switch (k) {
    case FenceKind::Fence: return StmtKind::Fence;
    case FenceKind::SSFence: return StmtKind::SSFence;
    case FenceKind::LLFence: return StmtKind::LLFence;
    case FenceKind::SyncWr: return StmtKind::SyncWr;
  }
  return StmtKind::Fence;
}

// Is a fence of this kind already part of the block of consecutive fence
// statements around the gap between `at` and its successor? Inserting the
// kind again there would not change the program's behaviour.
bool kind_in_block(const Program& p, const LabelRef& at, FenceKind k) {
  StmtKind want = stmt_kind_of(k);
  const auto& stmts = p.procs[at.proc].stmts;
  for (int i = at.stmt; i >= 0; --i) {
    if (!stmts[i].stmt.is_fence()) break;
    if (stmts[i].stmt.kind == want) return true;
  }
  for (int i = at.stmt + 1; i < (int)stmts.size(); ++i) {
    if (!stmts[i].stmt.is_fence()) break;
    if (stmts[i].stmt.kind == want) return true;
  }
  return false;
}

}  // namespace

std::set<FenceConstraint> analyze_witness(const Machine& m, const WitnessRun& run,
                                          const FenceMenu& menu) {
  const Program& p = m.program();
  std::set<FenceConstraint> out;

  auto add = [&](const std::string& label, FenceKind k) {
    if (!menu.allows(k)) return;
    auto at = p.find_label(label);
    assert(at);
    if (k == FenceKind::SyncWr) {
      if (p.procs[at->proc].stmts[at->stmt].stmt.kind != StmtKind::Write) return;
    } else if (kind_in_block(p, *at, k)) {
      return;
    }
    out.insert({label, k});
  };

  for (const ReorderedPair& rp : detect_reorderings(m, run)) {
    switch (rp.category) {
      case ReorderedPair::Category::WW:
        for (const auto& lab : rp.between) {
          add(lab, FenceKind::SSFence);
          add(lab, FenceKind::Fence);
        }
        add(rp.earlier, FenceKind::SyncWr);
        break;
      case ReorderedPair::Category::RR:
        for (const auto& lab : rp.between) {
          add(lab, FenceKind::LLFence);
          add(lab, FenceKind::Fence);
        }
        break;
      case ReorderedPair::Category::WR:
        for (const auto& lab : rp.between) {
          add(lab, FenceKind::Fence);
          add(lab, FenceKind::SSFence);
          add(lab, FenceKind::LLFence);
        }
        add(rp.earlier, FenceKind::SyncWr);
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// The synthesis loop

FencinsResult fencins(const Program& p, const SafetyProperty& bad, const FenceMenu& menu,
                      const CostModel& costs, uint64_t max_states) {
  if (!menu.fence)
    throw std::invalid_argument("fencins: the menu must include the full fence");
  if (costs.fence <= 0 || costs.ssfence <= 0 || costs.llfence <= 0 || costs.syncwr <= 0)
    throw std::invalid_argument("fencins: costs must be strictly positive");
  validate_property(bad, p);

  auto t0 = std::chrono::steady_clock::now();
  FencinsResult res;
  auto finish = [&](FencinsStatus st) {
    res.status = st;
    res.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (st != FencinsStatus::Optimal) res.optimal.clear();
    return res;
  };

  std::set<std::string> p_labels;
  for (const auto& proc : p.procs)
    for (const auto& ls : proc.stmts) p_labels.insert(ls.label);

  auto cost_of = [&](const FenceConstraint& c) { return costs.of(c.kind); };

  std::vector<std::set<FenceConstraint>> req;
  std::set<std::set<FenceConstraint>> req_seen;
  std::set<std::set<FenceConstraint>> opt;

  for (;;) {
    auto candidates = hits(req, cost_of);
    const std::set<FenceConstraint>* pick = nullptr;
    for (const auto& f : candidates)
      if (!opt.count(f)) {
        pick = &f;
        break;
      }
    if (!pick) break;  // every minimum-cost hitting set is verified sound

    ++res.stats.iterations;
    Program fenced = insert_fences(p, {pick->begin(), pick->end()});
    Machine m(fenced, MemModel::SiSd);
    ReachResult r = reachable(m, bad, max_states);
    res.stats.states += r.stats.states;
    if (r.verdict == ReachVerdict::BudgetExceeded) return finish(FencinsStatus::BudgetExceeded);
    if (r.verdict == ReachVerdict::Unreachable) {
      opt.insert(*pick);
      res.optimal = opt;
      continue;
    }

    std::set<FenceConstraint> c = analyze_witness(m, *r.witness, menu);
    // Constraints anchored at labels the insertion created refer back to the
    // anchor in the original program.
    std::set<FenceConstraint> remapped;
    for (FenceConstraint fc : c) {
      if (!p_labels.count(fc.label)) fc.label = fence_anchor_of(fc.label);
      if (!p_labels.count(fc.label))
        throw std::logic_error("fencins: candidate label " + fc.label +
                               " does not map back to the input program");
      if (!pick->count(fc)) remapped.insert(std::move(fc));
    }
    if (remapped.empty()) {
      // No fence can break this run: it contains no reordering (a full-fence
      // candidate survives the filters whenever a pair exists), so the bug
      // already shows under interleaving semantics. Nothing to synthesize.
      assert(detect_reorderings(m, *r.witness).empty());
      return finish(FencinsStatus::Uncorrectable);
    }
    ++res.stats.constraint_sets;
    if (!req_seen.insert(remapped).second)
      throw std::logic_error("fencins: refinement stalled on a repeated constraint set");
    req.push_back(std::move(remapped));
  }

  res.optimal = opt;
  res.cost = opt.empty() ? 0 : costs.total(*opt.begin());
  return finish(FencinsStatus::Optimal);
}

}  // namespace sisdmc
