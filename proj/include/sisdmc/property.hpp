#pragma once

// Safety properties: a disjunction of conjunctions of atomic predicates over
// control locations, register contents and LLC contents. A configuration is
// "bad" when some disjunct holds in it.

#include <optional>
#include <string>
#include <vector>

#include "sisdmc/lang.hpp"
#include "sisdmc/semantics.hpp"

namespace sisdmc {

struct AtomicPred {
  enum class Kind { At, RegEq, LlcEq };
  Kind kind;
  std::string proc;                  // At / RegEq: pid
  std::optional<std::string> label;  // At: nullopt means "has terminated"
  std::string reg;                   // RegEq
  std::string var;                   // LlcEq
  Value value = 0;                   // RegEq / LlcEq

  friend bool operator==(const AtomicPred&, const AtomicPred&) = default;
};

// Empty conjunction is trivially true.
using Conjunction = std::vector<AtomicPred>;

// Empty disjunction is trivially false (no configuration is bad).
struct SafetyProperty {
  std::vector<Conjunction> bad;
  friend bool operator==(const SafetyProperty&, const SafetyProperty&) = default;
};

// File format, one block per disjunct, '#' comments:
//
//   bad { P1 at end; P1.$r2 = 1; P1.$r3 = 0 }
//   bad { llc.x = 1; P0 at L3 }
//
// Atoms: "PID at LABEL", "PID at end", "PID.$reg = value", "llc.var = value".
SafetyProperty parse_property(std::string_view text);

std::string pretty_print(const SafetyProperty& sp);

// Referenced processes/labels/registers/variables must exist (labels inside
// the named process); values must lie in the domain. Throws ParseError.
void validate_property(const SafetyProperty& sp, const Program& p);

// Property lowered onto a Machine's slot layout: each atom becomes one
// slot/value test, so evaluation is a handful of integer compares.
class CompiledProperty {
 public:
  CompiledProperty(const SafetyProperty& sp, const Machine& m);

  bool eval(std::span<const Word> c) const {
    for (const auto& conj : conjs_) {
      bool ok = true;
      for (const auto& t : conj)
        if (c[t.slot] != t.value) {
          ok = false;
          break;
        }
      if (ok) return true;
    }
    return false;
  }

 private:
  struct Test {
    int slot;
    Word value;
  };
  std::vector<std::vector<Test>> conjs_;
};

inline bool eval_property(const SafetyProperty& sp, const Machine& m, const Config& c) {
  return CompiledProperty(sp, m).eval(c);
}

}  // namespace sisdmc
