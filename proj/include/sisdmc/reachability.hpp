#pragma once

// Explicit-state breadth-first search over the configuration graph. States
// are deduplicated by value; the first bad configuration found (hence one at
// minimal depth, tie-broken by the fixed transition enumeration order) yields
// the witness run.

#include <cstdint>
#include <functional>
#include <optional>

#include "sisdmc/property.hpp"
#include "sisdmc/semantics.hpp"

namespace sisdmc {

struct WitnessRun {
  Config initial;
  std::vector<std::pair<Transition, Config>> steps;  // transition + configuration after it
};

enum class ReachVerdict { Unreachable, Reachable, BudgetExceeded };

const char* to_string(ReachVerdict v);

struct ReachStats {
  uint64_t states = 0;       // distinct configurations discovered
  uint64_t transitions = 0;  // transitions fired during the search
  double wall_ms = 0;
};

struct ReachResult {
  ReachVerdict verdict;
  std::optional<WitnessRun> witness;  // set iff Reachable
  ReachStats stats;
};

inline constexpr uint64_t kDefaultMaxStates = 10'000'000;

ReachResult reachable(const Machine& m, const SafetyProperty& bad,
                      uint64_t max_states = kDefaultMaxStates);

inline ReachResult reachable(const Program& p, const SafetyProperty& bad, MemModel model,
                             uint64_t max_states = kDefaultMaxStates) {
  return reachable(Machine(p, model), bad, max_states);
}

// Exhaustive exploration; visit() sees every distinct reachable configuration
// exactly once. Returns false when the budget ran out before the frontier
// drained.
bool for_each_reachable(const Machine& m, uint64_t max_states,
                        const std::function<void(std::span<const Word>)>& visit);

// Replays a run against the semantics: the start must be an initial
// configuration, every step must be enabled and produce the recorded
// successor, and the final configuration must satisfy `bad`. Returns an
// explanation on failure, nullopt when the witness is genuine.
std::optional<std::string> verify_witness(const Machine& m, const SafetyProperty& bad,
                                          const WitnessRun& run);

}  // namespace sisdmc
