#include "sisdmc/lang.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace sisdmc {

// ---------------------------------------------------------------------------
// Expressions

std::shared_ptr<const Expr> Expr::constant(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->lit = v;
  return e;
}

std::shared_ptr<const Expr> Expr::regref(std::string name, int index) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Reg;
  e->reg = std::move(name);
  e->reg_index = index;
  return e;
}

std::shared_ptr<const Expr> Expr::binary(Kind k, std::shared_ptr<const Expr> l,
                                         std::shared_ptr<const Expr> r) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

Value Expr::eval(std::span<const Word> regs, Value domain) const {
  switch (kind) {
    case Kind::Const:
      return lit % domain;
    case Kind::Reg:
      assert(reg_index >= 0 && reg_index < (int)regs.size());
      return regs[reg_index];
    case Kind::Add:
      return (lhs->eval(regs, domain) + rhs->eval(regs, domain)) % domain;
    case Kind::Sub: {
      Value v = (lhs->eval(regs, domain) - rhs->eval(regs, domain)) % domain;
      return v < 0 ? v + domain : v;
    }
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Const:
      return a.lit == b.lit;
    case Expr::Kind::Reg:
      return a.reg == b.reg;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
  }
  return false;
}

std::shared_ptr<const BExpr> BExpr::compare(Kind k, std::shared_ptr<const Expr> a,
                                            std::shared_ptr<const Expr> b) {
  auto e = std::make_shared<BExpr>();
  e->kind = k;
  e->e0 = std::move(a);
  e->e1 = std::move(b);
  return e;
}

std::shared_ptr<const BExpr> BExpr::logical(Kind k, std::shared_ptr<const BExpr> a,
                                            std::shared_ptr<const BExpr> b) {
  auto e = std::make_shared<BExpr>();
  e->kind = k;
  e->b0 = std::move(a);
  e->b1 = std::move(b);
  return e;
}

bool BExpr::eval(std::span<const Word> regs, Value domain) const {
  switch (kind) {
    case Kind::Eq:
      return e0->eval(regs, domain) == e1->eval(regs, domain);
    case Kind::Ne:
      return e0->eval(regs, domain) != e1->eval(regs, domain);
    case Kind::Lt:
      return e0->eval(regs, domain) < e1->eval(regs, domain);
    case Kind::And:
      return b0->eval(regs, domain) && b1->eval(regs, domain);
    case Kind::Or:
      return b0->eval(regs, domain) || b1->eval(regs, domain);
    case Kind::Not:
      return !b0->eval(regs, domain);
  }
  return false;
}

bool operator==(const BExpr& a, const BExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case BExpr::Kind::Eq:
    case BExpr::Kind::Ne:
    case BExpr::Kind::Lt:
      return *a.e0 == *b.e0 && *a.e1 == *b.e1;
    case BExpr::Kind::And:
    case BExpr::Kind::Or:
      return *a.b0 == *b.b0 && *a.b1 == *b.b1;
    case BExpr::Kind::Not:
      return *a.b0 == *b.b0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Statements, processes, programs

static bool expr_eq(const std::shared_ptr<const Expr>& a, const std::shared_ptr<const Expr>& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool operator==(const Statement& a, const Statement& b) {
  if (a.kind != b.kind) return false;
  if (a.var != b.var || a.reg != b.reg || a.target != b.target) return false;
  if (!expr_eq(a.e0, b.e0) || !expr_eq(a.e1, b.e1)) return false;
  if (!a.cond != !b.cond) return false;
  if (a.cond && !(*a.cond == *b.cond)) return false;
  return true;
}

int Process::find_register(const std::string& r) const {
  for (size_t i = 0; i < registers.size(); ++i)
    if (registers[i] == r) return (int)i;
  return -1;
}

bool operator==(const Process& a, const Process& b) {
  return a.name == b.name && a.registers == b.registers && a.stmts == b.stmts;
}

bool operator==(const Program& a, const Program& b) {
  return a.domain == b.domain && a.vars == b.vars && a.procs == b.procs;
}

int Program::find_var(const std::string& name) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return (int)i;
  return -1;
}

int Program::find_proc(const std::string& name) const {
  for (size_t i = 0; i < procs.size(); ++i)
    if (procs[i].name == name) return (int)i;
  return -1;
}

std::optional<LabelRef> Program::find_label(const std::string& label) const {
  for (size_t p = 0; p < procs.size(); ++p)
    for (size_t s = 0; s < procs[p].stmts.size(); ++s)
      if (procs[p].stmts[s].label == label) return LabelRef{(int)p, (int)s};
  return std::nullopt;
}

std::optional<std::string> Program::next_of(const std::string& label) const {
  auto at = find_label(label);
  if (!at) throw std::invalid_argument("unknown label: " + label);
  const auto& stmts = procs[at->proc].stmts;
  if (at->stmt + 1 >= (int)stmts.size()) return std::nullopt;
  return stmts[at->stmt + 1].label;
}

namespace {

void collect_literals(const Expr& e, std::vector<Value>& out) {
  switch (e.kind) {
    case Expr::Kind::Const:
      out.push_back(e.lit);
      break;
    case Expr::Kind::Reg:
      break;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      collect_literals(*e.lhs, out);
      collect_literals(*e.rhs, out);
      break;
  }
}

void collect_literals(const BExpr& b, std::vector<Value>& out) {
  switch (b.kind) {
    case BExpr::Kind::Eq:
    case BExpr::Kind::Ne:
    case BExpr::Kind::Lt:
      collect_literals(*b.e0, out);
      collect_literals(*b.e1, out);
      break;
    case BExpr::Kind::And:
    case BExpr::Kind::Or:
      collect_literals(*b.b0, out);
      collect_literals(*b.b1, out);
      break;
    case BExpr::Kind::Not:
      collect_literals(*b.b0, out);
      break;
  }
}

void check_expr(const Program& p, const Process& proc, const Expr& e, int line, int col) {
  std::vector<Value> lits;
  collect_literals(e, lits);
  for (Value v : lits)
    if (v < 0 || v >= p.domain)
      throw ParseError("literal " + std::to_string(v) + " outside domain {0.." +
                           std::to_string(p.domain - 1) + "}",
                       line, col);
  // Register references were resolved at construction; re-check the indices
  // so hand-built or transformed ASTs are covered too.
  if (e.kind == Expr::Kind::Reg) {
    if (proc.find_register(e.reg) < 0)
      throw ParseError("undeclared register " + e.reg + " in process " + proc.name, line, col);
  } else if (e.kind == Expr::Kind::Add || e.kind == Expr::Kind::Sub) {
    check_expr(p, proc, *e.lhs, line, col);
    check_expr(p, proc, *e.rhs, line, col);
  }
}

void check_bexpr(const Program& p, const Process& proc, const BExpr& b, int line, int col) {
  std::vector<Value> lits;
  collect_literals(b, lits);
  for (Value v : lits)
    if (v < 0 || v >= p.domain)
      throw ParseError("literal " + std::to_string(v) + " outside domain {0.." +
                           std::to_string(p.domain - 1) + "}",
                       line, col);
  switch (b.kind) {
    case BExpr::Kind::Eq:
    case BExpr::Kind::Ne:
    case BExpr::Kind::Lt:
      check_expr(p, proc, *b.e0, line, col);
      check_expr(p, proc, *b.e1, line, col);
      break;
    case BExpr::Kind::And:
    case BExpr::Kind::Or:
      check_bexpr(p, proc, *b.b0, line, col);
      check_bexpr(p, proc, *b.b1, line, col);
      break;
    case BExpr::Kind::Not:
      check_bexpr(p, proc, *b.b0, line, col);
      break;
  }
}

}  // namespace

void Program::validate() const {
  if (domain < 2 || domain > kMaxDomain)
    throw ParseError("domain size must be in {2.." + std::to_string(kMaxDomain) + "}", 0, 0);
  if (vars.empty()) throw ParseError("program declares no variables", 0, 0);
  if (procs.empty()) throw ParseError("program declares no processes", 0, 0);

  std::set<std::string> var_names;
  for (const auto& v : vars) {
    if (!var_names.insert(v.name).second)
      throw ParseError("duplicate variable " + v.name, 0, 0);
    if (v.init && (*v.init < 0 || *v.init >= domain))
      throw ParseError("initializer of " + v.name + " outside domain", 0, 0);
  }

  std::set<std::string> pids, labels;
  for (const auto& proc : procs) {
    if (!pids.insert(proc.name).second) throw ParseError("duplicate process " + proc.name, 0, 0);
    std::set<std::string> regs;
    for (const auto& r : proc.registers)
      if (!regs.insert(r).second)
        throw ParseError("duplicate register " + r + " in process " + proc.name, 0, 0);
    if (proc.stmts.empty())
      throw ParseError("process " + proc.name + " has no statements", 0, 0);

    for (const auto& ls : proc.stmts) {
      if (!labels.insert(ls.label).second)
        throw ParseError("duplicate label " + ls.label, ls.line, ls.col);
      const Statement& s = ls.stmt;
      auto need_var = [&](const std::string& v) {
        if (find_var(v) < 0)
          throw ParseError("undeclared variable " + v, ls.line, ls.col);
      };
      auto need_reg = [&](const std::string& r) {
        if (proc.find_register(r) < 0)
          throw ParseError("undeclared register " + r + " in process " + proc.name, ls.line,
                           ls.col);
      };
      switch (s.kind) {
        case StmtKind::Write:
        case StmtKind::SyncWr:
          need_var(s.var);
          check_expr(*this, proc, *s.e0, ls.line, ls.col);
          break;
        case StmtKind::Read:
          need_reg(s.reg);
          need_var(s.var);
          break;
        case StmtKind::RegAssign:
          need_reg(s.reg);
          check_expr(*this, proc, *s.e0, ls.line, ls.col);
          break;
        case StmtKind::Cas:
          need_var(s.var);
          check_expr(*this, proc, *s.e0, ls.line, ls.col);
          check_expr(*this, proc, *s.e1, ls.line, ls.col);
          break;
        case StmtKind::CBranch:
          check_bexpr(*this, proc, *s.cond, ls.line, ls.col);
          break;
        case StmtKind::Fence:
        case StmtKind::SSFence:
        case StmtKind::LLFence:
          break;
      }
    }
  }

  // Branch targets: must exist and stay inside the declaring process.
  for (const auto& proc : procs) {
    for (const auto& ls : proc.stmts) {
      if (ls.stmt.kind != StmtKind::CBranch) continue;
      bool local = false;
      for (const auto& other : proc.stmts)
        if (other.label == ls.stmt.target) local = true;
      if (!local) {
        if (labels.count(ls.stmt.target))
          throw ParseError("branch target " + ls.stmt.target + " lies outside process " +
                               proc.name,
                           ls.line, ls.col);
        throw ParseError("unknown branch target " + ls.stmt.target, ls.line, ls.col);
      }
    }
  }
}

namespace {

std::shared_ptr<const Expr> resolve_expr(const Process& proc,
                                         const std::shared_ptr<const Expr>& e) {
  switch (e->kind) {
    case Expr::Kind::Const:
      return e;
    case Expr::Kind::Reg: {
      int idx = proc.find_register(e->reg);
      if (idx < 0)
        throw ParseError("undeclared register " + e->reg + " in process " + proc.name, 0, 0);
      if (idx == e->reg_index) return e;
      return Expr::regref(e->reg, idx);
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return Expr::binary(e->kind, resolve_expr(proc, e->lhs), resolve_expr(proc, e->rhs));
  }
  return e;
}

std::shared_ptr<const BExpr> resolve_bexpr(const Process& proc,
                                           const std::shared_ptr<const BExpr>& b) {
  switch (b->kind) {
    case BExpr::Kind::Eq:
    case BExpr::Kind::Ne:
    case BExpr::Kind::Lt:
      return BExpr::compare(b->kind, resolve_expr(proc, b->e0), resolve_expr(proc, b->e1));
    case BExpr::Kind::And:
    case BExpr::Kind::Or:
      return BExpr::logical(b->kind, resolve_bexpr(proc, b->b0), resolve_bexpr(proc, b->b1));
    case BExpr::Kind::Not:
      return BExpr::logical(BExpr::Kind::Not, resolve_bexpr(proc, b->b0), nullptr);
  }
  return b;
}

}  // namespace

void resolve_indices(Program& p) {
  for (auto& proc : p.procs) {
    for (auto& ls : proc.stmts) {
      Statement& s = ls.stmt;
      if (!s.var.empty()) {
        s.var_index = p.find_var(s.var);
        if (s.var_index < 0) throw ParseError("undeclared variable " + s.var, ls.line, ls.col);
      }
      if (!s.reg.empty()) {
        s.reg_index = proc.find_register(s.reg);
        if (s.reg_index < 0)
          throw ParseError("undeclared register " + s.reg + " in process " + proc.name, ls.line,
                           ls.col);
      }
      if (s.e0) s.e0 = resolve_expr(proc, s.e0);
      if (s.e1) s.e1 = resolve_expr(proc, s.e1);
      if (s.cond) s.cond = resolve_bexpr(proc, s.cond);
      if (s.kind == StmtKind::CBranch) {
        s.target_index = -1;
        for (size_t i = 0; i < proc.stmts.size(); ++i)
          if (proc.stmts[i].label == s.target) s.target_index = (int)i;
        // Missing or foreign targets are reported by validate() with a
        // clearer message; leave the index unresolved here.
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Pretty-printing

namespace {

int precedence(Expr::Kind k) {
  return (k == Expr::Kind::Add || k == Expr::Kind::Sub) ? 1 : 2;
}

void print_expr(std::ostream& os, const Expr& e, int parent_prec) {
  switch (e.kind) {
    case Expr::Kind::Const:
      os << e.lit;
      break;
    case Expr::Kind::Reg:
      os << e.reg;
      break;
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      bool paren = parent_prec > 1;
      if (paren) os << '(';
      print_expr(os, *e.lhs, 1);
      os << (e.kind == Expr::Kind::Add ? " + " : " - ");
      // Right operand of a - b - c must re-parenthesize; keep it simple and
      // wrap any compound right operand.
      print_expr(os, *e.rhs, 2);
      if (paren) os << ')';
      break;
    }
  }
}

void print_bexpr(std::ostream& os, const BExpr& b, int parent_prec) {
  // precedence: ! (3) > comparison (2) > && (1) > || (0)
  switch (b.kind) {
    case BExpr::Kind::Eq:
    case BExpr::Kind::Ne:
    case BExpr::Kind::Lt: {
      print_expr(os, *b.e0, 0);
      os << (b.kind == BExpr::Kind::Eq ? " = " : b.kind == BExpr::Kind::Ne ? " != " : " < ");
      print_expr(os, *b.e1, 0);
      break;
    }
    case BExpr::Kind::And: {
      bool paren = parent_prec > 1;
      if (paren) os << '(';
      print_bexpr(os, *b.b0, 1);
      os << " && ";
      print_bexpr(os, *b.b1, 1);
      if (paren) os << ')';
      break;
    }
    case BExpr::Kind::Or: {
      bool paren = parent_prec > 0;
      if (paren) os << '(';
      print_bexpr(os, *b.b0, 0);
      os << " || ";
      print_bexpr(os, *b.b1, 0);
      if (paren) os << ')';
      break;
    }
    case BExpr::Kind::Not:
      os << "!(";
      print_bexpr(os, *b.b0, 0);
      os << ')';
      break;
  }
}

void print_stmt(std::ostream& os, const Statement& s) {
  switch (s.kind) {
    case StmtKind::Write:
      os << s.var << " := ";
      print_expr(os, *s.e0, 0);
      break;
    case StmtKind::Read:
      os << s.reg << " := " << s.var;
      break;
    case StmtKind::RegAssign:
      os << s.reg << " := ";
      print_expr(os, *s.e0, 0);
      break;
    case StmtKind::Fence:
      os << "fence";
      break;
    case StmtKind::SSFence:
      os << "ssfence";
      break;
    case StmtKind::LLFence:
      os << "llfence";
      break;
    case StmtKind::SyncWr:
      os << "syncwr : " << s.var << " := ";
      print_expr(os, *s.e0, 0);
      break;
    case StmtKind::Cas:
      os << "cas(" << s.var << ", ";
      print_expr(os, *s.e0, 0);
      os << ", ";
      print_expr(os, *s.e1, 0);
      os << ')';
      break;
    case StmtKind::CBranch:
      os << "cbranch(";
      print_bexpr(os, *s.cond, 0);
      os << ") " << s.target;
      break;
  }
}

}  // namespace

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const BExpr& b) {
  std::ostringstream os;
  print_bexpr(os, b, 0);
  return os.str();
}

std::string pretty_print(const LabeledStmt& s) {
  std::ostringstream os;
  os << s.label << ": ";
  print_stmt(os, s.stmt);
  return os.str();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  os << "domain " << p.domain << ";\n";
  os << "data";
  for (const auto& v : p.vars) {
    os << ' ' << v.name << " = ";
    if (v.init)
      os << *v.init;
    else
      os << '*';
  }
  os << '\n';
  for (const auto& proc : p.procs) {
    os << "process " << proc.name << '\n';
    os << "registers";
    for (const auto& r : proc.registers) os << ' ' << r;
    os << '\n';
    os << "begin\n";
    for (const auto& ls : proc.stmts) {
      os << "  " << ls.label << ": ";
      print_stmt(os, ls.stmt);
      os << ";\n";
    }
    os << "end\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Fence insertion

const char* to_string(FenceKind k) {
  switch (k) {
    case FenceKind::Fence:
      return "fence";
    case FenceKind::SSFence:
      return "ssfence";
    case FenceKind::LLFence:
      return "llfence";
    case FenceKind::SyncWr:
      return "syncwr";
  }
  return "?";
}

std::optional<FenceKind> fence_kind_from_string(std::string_view s) {
  if (s == "fence" || s == "full") return FenceKind::Fence;
  if (s == "ssfence" || s == "ss") return FenceKind::SSFence;
  if (s == "llfence" || s == "ll") return FenceKind::LLFence;
  if (s == "syncwr" || s == "sw") return FenceKind::SyncWr;
  return std::nullopt;
}

std::string to_string(const FenceConstraint& c) {
  return "(" + c.label + ", " + to_string(c.kind) + ")";
}

std::string fence_anchor_of(const std::string& label) {
  auto pos = label.rfind(".f");
  if (pos == std::string::npos) return label;
  // Only strip a genuine ".f<digits>" suffix.
  if (pos + 2 >= label.size()) return label;
  for (size_t i = pos + 2; i < label.size(); ++i)
    if (!isdigit((unsigned char)label[i])) return label;
  return label.substr(0, pos);
}

Program insert_fences(const Program& p, const std::vector<FenceConstraint>& fences) {
  // Dedupe and group by anchor label.
  std::set<FenceConstraint> want(fences.begin(), fences.end());
  for (const auto& c : want) {
    auto at = p.find_label(c.label);
    if (!at) throw std::invalid_argument("insert_fences: unknown label " + c.label);
    if (c.kind == FenceKind::SyncWr &&
        p.procs[at->proc].stmts[at->stmt].stmt.kind != StmtKind::Write)
      throw std::invalid_argument("insert_fences: syncwr constraint at " + c.label +
                                  " does not name a plain write");
  }

  std::set<std::string> used_labels;
  for (const auto& proc : p.procs)
    for (const auto& ls : proc.stmts) used_labels.insert(ls.label);

  // Canonical order at one anchor: ssfence, then llfence, then fence.
  static const FenceKind kOrder[] = {FenceKind::SSFence, FenceKind::LLFence, FenceKind::Fence};

  Program out = p;
  for (auto& proc : out.procs) {
    std::vector<LabeledStmt> rewritten;
    rewritten.reserve(proc.stmts.size() + want.size());
    for (auto& ls : proc.stmts) {
      const std::string anchor = ls.label;
      if (want.count({anchor, FenceKind::SyncWr})) {
        LabeledStmt w = ls;
        w.stmt.kind = StmtKind::SyncWr;
        rewritten.push_back(std::move(w));
      } else {
        rewritten.push_back(std::move(ls));
      }
      int fresh = 0;
      for (FenceKind k : kOrder) {
        if (!want.count({anchor, k})) continue;
        LabeledStmt f;
        do {
          ++fresh;
          f.label = anchor + ".f" + std::to_string(fresh);
        } while (used_labels.count(f.label));
        used_labels.insert(f.label);
        f.stmt.kind = k == FenceKind::SSFence   ? StmtKind::SSFence
                      : k == FenceKind::LLFence ? StmtKind::LLFence
                                                : StmtKind::Fence;
        rewritten.push_back(std::move(f));
      }
    }
    proc.stmts = std::move(rewritten);
  }
  resolve_indices(out);  // inserted statements shift branch target indices
  out.validate();
  return out;
}

}  // namespace sisdmc
