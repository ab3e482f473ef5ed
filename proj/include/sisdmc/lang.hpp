#pragma once

// Program model: AST, parser, pretty-printer and fence insertion for the
// little concurrent language checked by this tool.  Programs are plain value
// types; expression nodes are immutable and shared, so copying a Program is
// cheap and never aliases mutable state.

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sisdmc {

// Machine word for one register / memory cell.  Values live in {0..N-1} for
// the program's domain size N, so 16 bits is plenty.
using Word = int16_t;
using Value = int;

constexpr Value kMaxDomain = 8192;

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(std::string msg, int line_, int col_)
      : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

// ---------------------------------------------------------------------------
// Expressions

// Arithmetic over the enclosing process's registers and integer literals.
// Evaluation is modulo the program's domain size.
struct Expr {
  enum class Kind { Const, Reg, Add, Sub };
  Kind kind;
  Value lit = 0;          // Const
  std::string reg;        // Reg: display name, '$'-prefixed
  int reg_index = -1;     // Reg: slot in the enclosing process's register file
  std::shared_ptr<const Expr> lhs, rhs;  // Add / Sub

  static std::shared_ptr<const Expr> constant(Value v);
  static std::shared_ptr<const Expr> regref(std::string name, int index);
  static std::shared_ptr<const Expr> binary(Kind k, std::shared_ptr<const Expr> l,
                                            std::shared_ptr<const Expr> r);

  Value eval(std::span<const Word> regs, Value domain) const;
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

// Boolean guards for cbranch: comparisons over Expr plus &&, ||, !.
struct BExpr {
  enum class Kind { Eq, Ne, Lt, And, Or, Not };
  Kind kind;
  std::shared_ptr<const Expr> e0, e1;    // Eq / Ne / Lt
  std::shared_ptr<const BExpr> b0, b1;   // And / Or / Not (b0 only)

  static std::shared_ptr<const BExpr> compare(Kind k, std::shared_ptr<const Expr> a,
                                              std::shared_ptr<const Expr> b);
  static std::shared_ptr<const BExpr> logical(Kind k, std::shared_ptr<const BExpr> a,
                                              std::shared_ptr<const BExpr> b);

  bool eval(std::span<const Word> regs, Value domain) const;
};

bool operator==(const BExpr& a, const BExpr& b);
inline bool operator!=(const BExpr& a, const BExpr& b) { return !(a == b); }

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
  Write,      // x := e          (goes to the local L1 cache)
  Read,       // $r := x         (from the local L1 cache)
  RegAssign,  // $r := e         (register-only)
  Fence,      // blocks until the L1 is empty
  SSFence,    // blocks until the L1 holds no dirty entry
  LLFence,    // blocks until the L1 holds no clean entry
  SyncWr,     // syncwr: x := e  (bypasses the L1, straight to the LLC)
  Cas,        // cas(x, e0, e1)  (atomic compare-and-swap on the LLC; blocks)
  CBranch,    // cbranch(b) L    (goto L if b, else fall through)
};

struct Statement {
  StmtKind kind;
  std::string var;    // Write / Read / SyncWr / Cas
  int var_index = -1;
  std::string reg;    // Read / RegAssign destination
  int reg_index = -1;
  std::shared_ptr<const Expr> e0, e1;  // value expr; Cas uses e0 = expected, e1 = new
  std::shared_ptr<const BExpr> cond;   // CBranch guard
  std::string target;                  // CBranch label
  int target_index = -1;               // resolved stmt index within the process

  bool is_fence() const {
    return kind == StmtKind::Fence || kind == StmtKind::SSFence || kind == StmtKind::LLFence;
  }
};

bool operator==(const Statement& a, const Statement& b);
inline bool operator!=(const Statement& a, const Statement& b) { return !(a == b); }

struct LabeledStmt {
  std::string label;
  Statement stmt;
  int line = 0, col = 0;  // source position; ignored by equality
};

inline bool operator==(const LabeledStmt& a, const LabeledStmt& b) {
  return a.label == b.label && a.stmt == b.stmt;
}
inline bool operator!=(const LabeledStmt& a, const LabeledStmt& b) { return !(a == b); }

struct Process {
  std::string name;                     // pid, e.g. "P0"
  std::vector<std::string> registers;   // '$'-prefixed, order = register file layout
  std::vector<LabeledStmt> stmts;

  int find_register(const std::string& r) const;  // -1 if absent
};

bool operator==(const Process& a, const Process& b);
inline bool operator!=(const Process& a, const Process& b) { return !(a == b); }

struct VarDecl {
  std::string name;
  std::optional<Value> init;  // nullopt = '*' (every value is a possible start)
};

inline bool operator==(const VarDecl& a, const VarDecl& b) {
  return a.name == b.name && a.init == b.init;
}

// A statement address: process index + statement index within that process.
struct LabelRef {
  int proc = -1;
  int stmt = -1;
  friend bool operator==(const LabelRef&, const LabelRef&) = default;
};

struct Program {
  Value domain = 2;  // values range over {0..domain-1}
  std::vector<VarDecl> vars;
  std::vector<Process> procs;

  int find_var(const std::string& name) const;    // -1 if absent
  int find_proc(const std::string& name) const;   // -1 if absent
  std::optional<LabelRef> find_label(const std::string& label) const;

  // Successor label within the same process; nullopt means the process ends
  // after `label`.  Throws std::invalid_argument for an unknown label.
  std::optional<std::string> next_of(const std::string& label) const;

  // Structural well-formedness: unique pids/labels/var names, declared
  // variables and registers only, branch targets inside the same process,
  // literals inside the domain.  Throws ParseError.  parse_program() already
  // calls this; it is public so transformed programs can be re-checked.
  void validate() const;
};

// (Re)computes the cached indices (var_index, reg_index, target_index and
// register slots inside expressions) from the names.  parse_program and
// insert_fences call this; hand-assembled programs must call it before the
// program is executed.  Throws ParseError on undeclared names.
void resolve_indices(Program& p);

bool operator==(const Program& a, const Program& b);
inline bool operator!=(const Program& a, const Program& b) { return !(a == b); }

// ---------------------------------------------------------------------------
// Parsing and printing

// Grammar (# starts a comment running to end of line):
//
//   pgm    ::= [ 'domain' INT ';' ] 'data' vdecl+ proc+
//   vdecl  ::= VAR '=' ( '*' | INT )
//   proc   ::= 'process' PID 'registers' REG* stmts
//   stmts  ::= 'begin' ( LABEL ':' stmt ';' )+ 'end'
//   stmt   ::= VAR ':=' expr | REG ':=' VAR | REG ':=' expr
//            | 'fence' | 'ssfence' | 'llfence'
//            | 'syncwr' ':' VAR ':=' expr
//            | 'cas' '(' VAR ',' expr ',' expr ')'
//            | 'cbranch' '(' bexpr ')' LABEL
//
// Registers are '$'-prefixed identifiers; variables and labels are plain
// identifiers (labels may contain dots, which fence insertion exploits for
// fresh names).  With no 'domain' header the domain size defaults to
// 1 + the largest integer literal in the program, and at least 2.
Program parse_program(std::string_view text);

// Inverse of parse_program up to formatting: parse(pretty_print(p)) == p.
std::string pretty_print(const Program& p);

std::string pretty_print(const Expr& e);
std::string pretty_print(const BExpr& b);
std::string pretty_print(const LabeledStmt& s);

// ---------------------------------------------------------------------------
// Fence insertion

enum class FenceKind { Fence, SSFence, LLFence, SyncWr };

const char* to_string(FenceKind k);
std::optional<FenceKind> fence_kind_from_string(std::string_view s);

// A requested fence: for Fence/SSFence/LLFence, insert between `label` and
// its successor; for SyncWr, rewrite the plain write at `label` in place.
struct FenceConstraint {
  std::string label;
  FenceKind kind;
  friend auto operator<=>(const FenceConstraint&, const FenceConstraint&) = default;
};

std::string to_string(const FenceConstraint& c);

// Applies a set of fence constraints.  Duplicates are collapsed; several
// fences at one anchor are inserted in the canonical order ssfence, llfence,
// fence; inserted statements get fresh labels "<anchor>.f1", "<anchor>.f2", …
// Throws std::invalid_argument for an unknown label or a syncwr constraint
// whose anchor is not a plain write.
Program insert_fences(const Program& p, const std::vector<FenceConstraint>& fences);

// Anchor label an inserted fresh label refers back to ("L1.f2" -> "L1");
// returns `label` unchanged when it carries no fresh suffix.
std::string fence_anchor_of(const std::string& label);

}  // namespace sisdmc
