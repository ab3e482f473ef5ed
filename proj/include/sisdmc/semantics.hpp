#pragma once

// Operational semantics. A configuration pairs each process's local state
// (program counter, register file, private L1 cache) with the shared LLC.
// The L1 tracks, per variable, whether the process holds no copy, a clean
// copy, or a dirty copy awaiting write-back. Three system events outside
// program control move data around: fetch installs a clean copy of the LLC
// value, wrllc writes a dirty copy back (making it clean), evict drops a
// clean copy. Fences restrict what may sit in the L1 when they commit.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sisdmc/lang.hpp"

namespace sisdmc {

enum class MemModel {
  SiSd,  // full model: self-invalidation + self-downgrade, all rules
  Si,    // every plain write behaves as a synchronized write
  Sc,    // sequential consistency: accesses act on the LLC, no L1, no events
};

const char* to_string(MemModel m);
std::optional<MemModel> mem_model_from_string(std::string_view s);

enum class L1Status : uint8_t { Invalid, Clean, Dirty };

// One atomic step: either a labelled program instruction or a system event.
struct Transition {
  enum class Kind : uint8_t { Instr, Fetch, WrLlc, Evict };
  Kind kind;
  uint8_t proc;  // process index
  int16_t arg;   // Instr: statement index; events: variable index
  friend bool operator==(const Transition&, const Transition&) = default;
};

// Packed configuration: a flat vector of Word slots with a fixed per-program
// layout (see Machine::stride). Cheap to hash, compare and copy, which is
// what the search cares about.
using Config = std::vector<Word>;

class Machine {
 public:
  Machine(const Program& p, MemModel model);

  const Program& program() const { return prog_; }
  MemModel model() const { return model_; }
  int stride() const { return stride_; }

  // One configuration per assignment of the '*' variables (enumerated in
  // declaration order, values ascending), single configuration otherwise.
  std::vector<Config> initial_configurations() const;

  // Appends the enabled transitions of c in the fixed exploration order:
  // processes in declaration order; per process first its instruction, then
  // per variable (declaration order) whichever of fetch/wrllc/evict applies.
  void enabled_transitions(std::span<const Word> c, std::vector<Transition>& out) const;
  std::vector<Transition> enabled_transitions(const Config& c) const;

  bool is_enabled(std::span<const Word> c, Transition t) const;

  // Successor computation. apply_into requires t enabled and dst != src.
  void apply_into(std::span<const Word> c, Transition t, std::span<Word> dst) const;
  Config apply_transition(const Config& c, Transition t) const;  // throws if disabled

  // --- accessors -----------------------------------------------------------

  int pc_of(std::span<const Word> c, int proc) const { return c[pc_slot(proc)]; }
  bool at_end(std::span<const Word> c, int proc) const;
  // Label of the next instruction; nullopt once the process has terminated.
  std::optional<std::string> label_of(std::span<const Word> c, int proc) const;
  Word reg_of(std::span<const Word> c, int proc, int reg) const {
    return c[reg_slot(proc, reg)];
  }
  L1Status l1_status(std::span<const Word> c, int proc, int var) const;
  Value l1_value(std::span<const Word> c, int proc, int var) const;  // Invalid: meaningless
  Value llc_of(std::span<const Word> c, int var) const { return c[llc_slot(var)]; }

  // --- slot layout (used by compiled safety properties) ---------------------

  int pc_slot(int proc) const { return procs_[proc].pc; }
  int reg_slot(int proc, int reg) const { return procs_[proc].regs + reg; }
  int l1_slot(int proc, int var) const { return procs_[proc].l1 + var; }
  int llc_slot(int var) const { return llc_ + var; }
  int end_pc(int proc) const { return (int)prog_.procs[proc].stmts.size(); }

  // --- display ---------------------------------------------------------------

  std::string format(std::span<const Word> c) const;  // one-line state summary
  std::string format(const Transition& t) const;      // "L4", "fetch(P1,z)", ...

 private:
  struct ProcLayout {
    int pc, regs, l1, n_regs;
  };

  bool instr_enabled(std::span<const Word> c, int proc) const;
  void apply_instr(std::span<const Word> c, int proc, std::span<Word> dst) const;

  Word l1_clean(Value v) const { return (Word)(1 + v); }
  Word l1_dirty(Value v) const { return (Word)(1 + prog_.domain + v); }

  Program prog_;
  MemModel model_;
  std::vector<ProcLayout> procs_;
  int llc_ = 0;
  int stride_ = 0;
};

// The program whose explicit synchronized writes make the Si model literal:
// every plain write is rewritten to syncwr. Running the result under SiSd is
// equivalent to running the original under Si.
Program to_si_view(const Program& p);

}  // namespace sisdmc
