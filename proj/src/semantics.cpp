#include "sisdmc/semantics.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace sisdmc {

const char* to_string(MemModel m) {
  switch (m) {
    case MemModel::SiSd: return "sisd";
    case MemModel::Si: return "si";
    case MemModel::Sc: return "sc";
  }
  return "?";
}

std::optional<MemModel> mem_model_from_string(std::string_view s) {
  if (s == "sisd") return MemModel::SiSd;
  if (s == "si") return MemModel::Si;
  if (s == "sc") return MemModel::Sc;
  return std::nullopt;
}

Machine::Machine(const Program& p, MemModel model) : prog_(p), model_(model) {
  if (prog_.procs.size() > 255) throw std::invalid_argument("too many processes");
  int off = 0;
  int n_vars = (int)prog_.vars.size();
  for (const auto& proc : prog_.procs) {
    ProcLayout l;
    l.pc = off++;
    l.regs = off;
    l.n_regs = (int)proc.registers.size();
    off += l.n_regs;
    l.l1 = off;
    off += n_vars;
    procs_.push_back(l);
  }
  llc_ = off;
  off += n_vars;
  stride_ = off;
}

bool Machine::at_end(std::span<const Word> c, int proc) const {
  return pc_of(c, proc) >= end_pc(proc);
}

std::optional<std::string> Machine::label_of(std::span<const Word> c, int proc) const {
  if (at_end(c, proc)) return std::nullopt;
  return prog_.procs[proc].stmts[pc_of(c, proc)].label;
}

L1Status Machine::l1_status(std::span<const Word> c, int proc, int var) const {
  Word w = c[l1_slot(proc, var)];
  if (w == 0) return L1Status::Invalid;
  return w <= prog_.domain ? L1Status::Clean : L1Status::Dirty;
}

Value Machine::l1_value(std::span<const Word> c, int proc, int var) const {
  Word w = c[l1_slot(proc, var)];
  if (w == 0) return 0;
  return w <= prog_.domain ? w - 1 : w - 1 - prog_.domain;
}

std::vector<Config> Machine::initial_configurations() const {
  Config base(stride_, 0);
  std::vector<int> stars;
  for (size_t v = 0; v < prog_.vars.size(); ++v) {
    if (prog_.vars[v].init)
      base[llc_slot((int)v)] = (Word)*prog_.vars[v].init;
    else
      stars.push_back((int)v);
  }
  if (stars.empty()) return {base};

  // Odometer over the '*' variables, first-declared most significant.
  std::vector<Config> out;
  std::vector<Value> digit(stars.size(), 0);
  for (;;) {
    Config c = base;
    for (size_t i = 0; i < stars.size(); ++i) c[llc_slot(stars[i])] = (Word)digit[i];
    out.push_back(std::move(c));
    int i = (int)stars.size() - 1;
    while (i >= 0 && ++digit[i] == prog_.domain) digit[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enabledness

bool Machine::instr_enabled(std::span<const Word> c, int proc) const {
  if (at_end(c, proc)) return false;
  const Statement& s = prog_.procs[proc].stmts[pc_of(c, proc)].stmt;
  const ProcLayout& pl = procs_[proc];
  std::span<const Word> regs = c.subspan(pl.regs, pl.n_regs);
  int n_vars = (int)prog_.vars.size();

  if (model_ == MemModel::Sc) {
    if (s.kind == StmtKind::Cas)
      return llc_of(c, s.var_index) == s.e0->eval(regs, prog_.domain);
    return true;  // reads/writes act on the LLC, fences skip
  }

  StmtKind kind = s.kind;
  if (model_ == MemModel::Si && kind == StmtKind::Write) kind = StmtKind::SyncWr;

  switch (kind) {
    case StmtKind::Write:
    case StmtKind::Read:
      return l1_status(c, proc, s.var_index) != L1Status::Invalid;
    case StmtKind::RegAssign:
    case StmtKind::CBranch:
      return true;
    case StmtKind::Fence:
      for (int v = 0; v < n_vars; ++v)
        if (l1_status(c, proc, v) != L1Status::Invalid) return false;
      return true;
    case StmtKind::SSFence:
      for (int v = 0; v < n_vars; ++v)
        if (l1_status(c, proc, v) == L1Status::Dirty) return false;
      return true;
    case StmtKind::LLFence:
      for (int v = 0; v < n_vars; ++v)
        if (l1_status(c, proc, v) == L1Status::Clean) return false;
      return true;
    case StmtKind::SyncWr:
      return l1_status(c, proc, s.var_index) == L1Status::Invalid;
    case StmtKind::Cas:
      return l1_status(c, proc, s.var_index) == L1Status::Invalid &&
             llc_of(c, s.var_index) == s.e0->eval(regs, prog_.domain);
  }
  return false;
}

void Machine::enabled_transitions(std::span<const Word> c,
                                  std::vector<Transition>& out) const {
  int n_vars = (int)prog_.vars.size();
  for (int p = 0; p < (int)prog_.procs.size(); ++p) {
    if (instr_enabled(c, p))
      out.push_back({Transition::Kind::Instr, (uint8_t)p, (int16_t)pc_of(c, p)});
    if (model_ == MemModel::Sc) continue;
    for (int v = 0; v < n_vars; ++v) {
      switch (l1_status(c, p, v)) {
        case L1Status::Invalid:
          out.push_back({Transition::Kind::Fetch, (uint8_t)p, (int16_t)v});
          break;
        case L1Status::Dirty:
          out.push_back({Transition::Kind::WrLlc, (uint8_t)p, (int16_t)v});
          break;
        case L1Status::Clean:
          out.push_back({Transition::Kind::Evict, (uint8_t)p, (int16_t)v});
          break;
      }
    }
  }
}

std::vector<Transition> Machine::enabled_transitions(const Config& c) const {
  std::vector<Transition> out;
  enabled_transitions(std::span<const Word>(c), out);
  return out;
}

bool Machine::is_enabled(std::span<const Word> c, Transition t) const {
  int p = t.proc;
  if (p < 0 || p >= (int)prog_.procs.size()) return false;
  switch (t.kind) {
    case Transition::Kind::Instr:
      return !at_end(c, p) && pc_of(c, p) == t.arg && instr_enabled(c, p);
    case Transition::Kind::Fetch:
      return model_ != MemModel::Sc && l1_status(c, p, t.arg) == L1Status::Invalid;
    case Transition::Kind::WrLlc:
      return model_ != MemModel::Sc && l1_status(c, p, t.arg) == L1Status::Dirty;
    case Transition::Kind::Evict:
      return model_ != MemModel::Sc && l1_status(c, p, t.arg) == L1Status::Clean;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Successors

void Machine::apply_instr(std::span<const Word> c, int proc, std::span<Word> dst) const {
  const ProcLayout& pl = procs_[proc];
  const Statement& s = prog_.procs[proc].stmts[pc_of(c, proc)].stmt;
  std::span<const Word> regs = c.subspan(pl.regs, pl.n_regs);
  Value domain = prog_.domain;
  Word next_pc = (Word)(pc_of(c, proc) + 1);

  StmtKind kind = s.kind;
  if (model_ == MemModel::Si && kind == StmtKind::Write) kind = StmtKind::SyncWr;
  if (model_ == MemModel::Sc) {
    // Reads and writes act directly on the LLC; fences are skips.
    switch (kind) {
      case StmtKind::Write:
      case StmtKind::SyncWr:
        dst[llc_slot(s.var_index)] = (Word)s.e0->eval(regs, domain);
        break;
      case StmtKind::Read:
        dst[pl.regs + s.reg_index] = (Word)llc_of(c, s.var_index);
        break;
      case StmtKind::RegAssign:
        dst[pl.regs + s.reg_index] = (Word)s.e0->eval(regs, domain);
        break;
      case StmtKind::Cas:
        dst[llc_slot(s.var_index)] = (Word)s.e1->eval(regs, domain);
        break;
      case StmtKind::CBranch:
        if (s.cond->eval(regs, domain)) next_pc = (Word)s.target_index;
        break;
      case StmtKind::Fence:
      case StmtKind::SSFence:
      case StmtKind::LLFence:
        break;
    }
    dst[pl.pc] = next_pc;
    return;
  }

  switch (kind) {
    case StmtKind::Write:
      dst[l1_slot(proc, s.var_index)] = l1_dirty(s.e0->eval(regs, domain));
      break;
    case StmtKind::Read:
      dst[pl.regs + s.reg_index] = (Word)l1_value(c, proc, s.var_index);
      break;
    case StmtKind::RegAssign:
      dst[pl.regs + s.reg_index] = (Word)s.e0->eval(regs, domain);
      break;
    case StmtKind::SyncWr:
      dst[llc_slot(s.var_index)] = (Word)s.e0->eval(regs, domain);
      break;
    case StmtKind::Cas:
      dst[llc_slot(s.var_index)] = (Word)s.e1->eval(regs, domain);
      break;
    case StmtKind::CBranch:
      if (s.cond->eval(regs, domain)) next_pc = (Word)s.target_index;
      break;
    case StmtKind::Fence:
    case StmtKind::SSFence:
    case StmtKind::LLFence:
      break;
  }
  dst[pl.pc] = next_pc;
}

void Machine::apply_into(std::span<const Word> c, Transition t, std::span<Word> dst) const {
  assert(dst.size() == (size_t)stride_ && c.size() == (size_t)stride_);
  std::copy(c.begin(), c.end(), dst.begin());
  int p = t.proc;
  switch (t.kind) {
    case Transition::Kind::Instr:
      apply_instr(c, p, dst);
      break;
    case Transition::Kind::Fetch:
      dst[l1_slot(p, t.arg)] = l1_clean(llc_of(c, t.arg));
      break;
    case Transition::Kind::WrLlc: {
      Value v = l1_value(c, p, t.arg);
      dst[llc_slot(t.arg)] = (Word)v;
      dst[l1_slot(p, t.arg)] = l1_clean(v);
      break;
    }
    case Transition::Kind::Evict:
      dst[l1_slot(p, t.arg)] = 0;
      break;
  }
}

Config Machine::apply_transition(const Config& c, Transition t) const {
  if (!is_enabled(c, t))
    throw std::invalid_argument("apply_transition: transition not enabled: " + format(t));
  Config out(stride_);
  apply_into(c, t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Display

std::string Machine::format(const Transition& t) const {
  const auto& proc = prog_.procs[t.proc];
  switch (t.kind) {
    case Transition::Kind::Instr:
      return proc.stmts[t.arg].label;
    case Transition::Kind::Fetch:
      return "fetch(" + proc.name + "," + prog_.vars[t.arg].name + ")";
    case Transition::Kind::WrLlc:
      return "wrllc(" + proc.name + "," + prog_.vars[t.arg].name + ")";
    case Transition::Kind::Evict:
      return "evict(" + proc.name + "," + prog_.vars[t.arg].name + ")";
  }
  return "?";
}

std::string Machine::format(std::span<const Word> c) const {
  std::ostringstream os;
  for (int p = 0; p < (int)prog_.procs.size(); ++p) {
    const auto& proc = prog_.procs[p];
    if (p) os << " | ";
    os << proc.name << ": ";
    auto lab = label_of(c, p);
    os << (lab ? *lab : std::string("end"));
    for (int r = 0; r < (int)proc.registers.size(); ++r)
      os << ' ' << proc.registers[r] << '=' << reg_of(c, p, r);
    os << " L1{";
    bool first = true;
    for (int v = 0; v < (int)prog_.vars.size(); ++v) {
      L1Status st = l1_status(c, p, v);
      if (st == L1Status::Invalid) continue;
      if (!first) os << ' ';
      first = false;
      os << prog_.vars[v].name << '=' << l1_value(c, p, v)
         << (st == L1Status::Dirty ? "*" : "");
    }
    os << '}';
  }
  os << " | LLC:";
  for (int v = 0; v < (int)prog_.vars.size(); ++v)
    os << ' ' << prog_.vars[v].name << '=' << llc_of(c, v);
  return os.str();
}

// ---------------------------------------------------------------------------

Program to_si_view(const Program& p) {
  Program out = p;
  for (auto& proc : out.procs)
    for (auto& ls : proc.stmts)
      if (ls.stmt.kind == StmtKind::Write) ls.stmt.kind = StmtKind::SyncWr;
  return out;
}

}  // namespace sisdmc
