#include "sisdmc/property.hpp"

#include <sstream>

#include "lexer.hpp"

namespace sisdmc {

namespace {

using detail::Tok;
using detail::Token;

class PropParser {
 public:
  explicit PropParser(std::string_view text) : toks_(detail::lex(text, /*dot_in_ident=*/false)) {}

  SafetyProperty run() {
    SafetyProperty sp;
    while (peek().type != Tok::End) {
      if (!(peek().type == Tok::Ident && peek().text == "bad"))
        fail("expected 'bad', got " + peek().text);
      next();
      expect(Tok::LBrace, "'{'");
      Conjunction conj;
      while (peek().type != Tok::RBrace) {
        conj.push_back(parse_atom());
        if (peek().type == Tok::Semi)
          next();
        else if (peek().type != Tok::RBrace)
          fail("expected ';' or '}'");
      }
      expect(Tok::RBrace, "'}'");
      sp.bad.push_back(std::move(conj));
    }
    return sp;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek() const { return toks_[std::min(pos_, toks_.size() - 1)]; }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  Token expect(Tok type, const std::string& what) {
    if (peek().type != type) fail("expected " + what);
    return next();
  }

  // Labels may contain dots (inserted fences are "L1.f2"); the property lexer
  // keeps '.' separate, so stitch the pieces back together.
  std::string parse_label() {
    std::string lab = expect(Tok::Ident, "label").text;
    while (peek().type == Tok::Dot) {
      next();
      if (peek().type == Tok::Ident || peek().type == Tok::Int)
        lab += "." + next().text;
      else
        fail("expected label fragment after '.'");
    }
    return lab;
  }

  AtomicPred parse_atom() {
    AtomicPred a;
    Token head = expect(Tok::Ident, "'llc' or a process id");
    if (head.text == "llc" && peek().type == Tok::Dot) {
      next();
      a.kind = AtomicPred::Kind::LlcEq;
      a.var = expect(Tok::Ident, "variable name").text;
      expect(Tok::Eq, "'='");
      a.value = (Value)expect(Tok::Int, "value").value;
      return a;
    }
    a.proc = head.text;
    if (peek().type == Tok::Dot) {
      next();
      a.kind = AtomicPred::Kind::RegEq;
      a.reg = expect(Tok::RegIdent, "register name").text;
      expect(Tok::Eq, "'='");
      a.value = (Value)expect(Tok::Int, "value").value;
      return a;
    }
    Token at = expect(Tok::Ident, "'at'");
    if (at.text != "at") fail("expected 'at' after process id");
    a.kind = AtomicPred::Kind::At;
    if (peek().type == Tok::Ident && peek().text == "end") {
      next();
      a.label = std::nullopt;
    } else {
      a.label = parse_label();
    }
    return a;
  }
};

}  // namespace

SafetyProperty parse_property(std::string_view text) { return PropParser(text).run(); }

std::string pretty_print(const SafetyProperty& sp) {
  std::ostringstream os;
  for (const auto& conj : sp.bad) {
    os << "bad {";
    for (size_t i = 0; i < conj.size(); ++i) {
      const AtomicPred& a = conj[i];
      os << (i ? "; " : " ");
      switch (a.kind) {
        case AtomicPred::Kind::At:
          os << a.proc << " at " << (a.label ? *a.label : "end");
          break;
        case AtomicPred::Kind::RegEq:
          os << a.proc << "." << a.reg << " = " << a.value;
          break;
        case AtomicPred::Kind::LlcEq:
          os << "llc." << a.var << " = " << a.value;
          break;
      }
    }
    os << " }\n";
  }
  return os.str();
}

void validate_property(const SafetyProperty& sp, const Program& p) {
  for (const auto& conj : sp.bad) {
    for (const AtomicPred& a : conj) {
      switch (a.kind) {
        case AtomicPred::Kind::At: {
          int pi = p.find_proc(a.proc);
          if (pi < 0) throw ParseError("unknown process " + a.proc, 0, 0);
          if (a.label) {
            auto at = p.find_label(*a.label);
            if (!at) throw ParseError("unknown label " + *a.label, 0, 0);
            if (at->proc != pi)
              throw ParseError("label " + *a.label + " is not in process " + a.proc, 0, 0);
          }
          break;
        }
        case AtomicPred::Kind::RegEq: {
          int pi = p.find_proc(a.proc);
          if (pi < 0) throw ParseError("unknown process " + a.proc, 0, 0);
          if (p.procs[pi].find_register(a.reg) < 0)
            throw ParseError("process " + a.proc + " has no register " + a.reg, 0, 0);
          if (a.value < 0 || a.value >= p.domain)
            throw ParseError("value outside domain in property", 0, 0);
          break;
        }
        case AtomicPred::Kind::LlcEq:
          if (p.find_var(a.var) < 0) throw ParseError("unknown variable " + a.var, 0, 0);
          if (a.value < 0 || a.value >= p.domain)
            throw ParseError("value outside domain in property", 0, 0);
          break;
      }
    }
  }
}

CompiledProperty::CompiledProperty(const SafetyProperty& sp, const Machine& m) {
  const Program& p = m.program();
  validate_property(sp, p);
  for (const auto& conj : sp.bad) {
    std::vector<Test> tests;
    for (const AtomicPred& a : conj) {
      switch (a.kind) {
        case AtomicPred::Kind::At: {
          int pi = p.find_proc(a.proc);
          int pc = a.label ? p.find_label(*a.label)->stmt : m.end_pc(pi);
          tests.push_back({m.pc_slot(pi), (Word)pc});
          break;
        }
        case AtomicPred::Kind::RegEq: {
          int pi = p.find_proc(a.proc);
          tests.push_back({m.reg_slot(pi, p.procs[pi].find_register(a.reg)), (Word)a.value});
          break;
        }
        case AtomicPred::Kind::LlcEq:
          tests.push_back({m.llc_slot(p.find_var(a.var)), (Word)a.value});
          break;
      }
    }
    conjs_.push_back(std::move(tests));
  }
}

}  // namespace sisdmc
