#pragma once

// Fence synthesis: find every cost-minimal set of fences whose insertion
// makes the bad configurations unreachable. Counterexample-guided: each
// failed candidate's witness run is mined for access reorderings, the fences
// that could break at least one of them form a constraint set, and every
// sound fence set must hit every recorded constraint set, so the next
// candidates are the minimum-cost hitting sets.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "sisdmc/hitting_set.hpp"
#include "sisdmc/reachability.hpp"

namespace sisdmc {

// Per-kind insertion costs, all strictly positive.
struct CostModel {
  int fence = 2, ssfence = 1, llfence = 1, syncwr = 1;

  int of(FenceKind k) const;
  long total(const std::set<FenceConstraint>& f) const;

  static CostModel overview() { return {2, 1, 1, 1}; }
  static CostModel experiments() { return {10, 5, 5, 1}; }
};

// Fence kinds the synthesizer may insert. The full fence must stay on the
// menu: it can break any reordering, which keeps refinement from stalling.
struct FenceMenu {
  bool fence = true;
  bool ssfence = false;
  bool llfence = false;
  bool syncwr = false;

  bool allows(FenceKind k) const;

  static FenceMenu full_only() { return {true, false, false, false}; }
  static FenceMenu ll_ss_full() { return {true, true, true, false}; }
  static FenceMenu all() { return {true, true, true, true}; }
};

// Two same-process accesses whose global visibility order contradicts their
// program order. A write becomes visible at its write-back (wrllc), at its
// own index for syncwr/cas, or never (point = run length); a read's value
// dates from the fetch that brought it in (reads satisfied by the process's
// own dirty copy don't pair).
struct ReorderedPair {
  enum class Category { WW, RR, WR };
  Category category;
  int proc;
  std::string earlier, later;        // instruction labels
  size_t earlier_index, later_index; // 0-based indices into run.steps
  // Labels this process executed from `earlier` (inclusive) up to `later`
  // (exclusive), in run order, duplicates collapsed: the fence positions that
  // separate the two accesses.
  std::vector<std::string> between;

  friend bool operator==(const ReorderedPair&, const ReorderedPair&) = default;
};

const char* to_string(ReorderedPair::Category c);

std::vector<ReorderedPair> detect_reorderings(const Machine& m, const WitnessRun& run);

// Union over all reordered pairs of the fence constraints able to break that
// pair, restricted to the menu, minus constraints whose kind already sits in
// the fence block around the insertion point (re-inserting those would leave
// the program unchanged). Empty iff detect_reorderings found nothing, i.e.
// the run is a plain interleaving error no fence can fix.
std::set<FenceConstraint> analyze_witness(const Machine& m, const WitnessRun& run,
                                          const FenceMenu& menu);

enum class FencinsStatus { Optimal, Uncorrectable, BudgetExceeded };

const char* to_string(FencinsStatus s);

struct FencinsStats {
  uint64_t iterations = 0;      // candidate fence sets checked
  uint64_t constraint_sets = 0; // witness analyses recorded
  uint64_t states = 0;          // states explored across all reachability calls
  double wall_ms = 0;
};

struct FencinsResult {
  FencinsStatus status = FencinsStatus::Optimal;
  // All cost-optimal sound fence sets; { {} } when the program is already
  // safe. Populated only for status Optimal.
  std::set<std::set<FenceConstraint>> optimal;
  long cost = 0;  // shared cost of every optimal set
  FencinsStats stats;
};

FencinsResult fencins(const Program& p, const SafetyProperty& bad, const FenceMenu& menu,
                      const CostModel& costs, uint64_t max_states = kDefaultMaxStates);

std::string to_string(const std::set<FenceConstraint>& f);

}  // namespace sisdmc
