#include <algorithm>
#include <optional>

#include "lexer.hpp"
#include "sisdmc/lang.hpp"

namespace sisdmc {

namespace {

using detail::Tok;
using detail::Token;

bool is_keyword(const std::string& s) {
  static const char* kw[] = {"domain", "data",    "process", "registers", "begin",
                             "end",    "fence",   "ssfence", "llfence",   "syncwr",
                             "cas",    "cbranch"};
  return std::find(std::begin(kw), std::end(kw), s) != std::end(kw);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(detail::lex(text, /*dot_in_ident=*/true)) {}

  Program run() {
    Program p;
    bool explicit_domain = false;
    if (at_ident("domain")) {
      next();
      p.domain = (Value)expect(Tok::Int, "domain size").value;
      expect(Tok::Semi, "';' after domain size");
      explicit_domain = true;
    }
    expect_ident("data");
    while (peek().type == Tok::Ident && !is_keyword(peek().text)) {
      VarDecl v;
      v.name = next().text;
      expect(Tok::Eq, "'=' in variable declaration");
      if (peek().type == Tok::Star) {
        next();
      } else {
        Token t = expect(Tok::Int, "initial value or '*'");
        v.init = (Value)t.value;
        max_literal_ = std::max(max_literal_, (Value)t.value);
      }
      p.vars.push_back(std::move(v));
    }
    if (p.vars.empty()) fail("expected at least one variable declaration");
    while (at_ident("process")) p.procs.push_back(parse_process(p));
    if (peek().type != Tok::End)
      fail("expected 'process' or end of input, got " + describe(peek()));
    if (!explicit_domain) p.domain = std::max<Value>(2, max_literal_ + 1);

    // Resolve indices now that all names are known, then validate.
    resolve_indices(p);
    p.validate();
    return p;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  Value max_literal_ = 0;

  const Token& peek(size_t off = 0) const {
    return toks_[std::min(pos_ + off, toks_.size() - 1)];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_ident(const char* s) const {
    return peek().type == Tok::Ident && peek().text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  static std::string describe(const Token& t) {
    if (t.type == Tok::Ident || t.type == Tok::RegIdent) return "'" + t.text + "'";
    if (t.type == Tok::Int) return "'" + t.text + "'";
    return detail::tok_name(t.type);
  }
  Token expect(Tok type, const std::string& what) {
    if (peek().type != type)
      fail("expected " + what + ", got " + describe(peek()));
    return next();
  }
  void expect_ident(const char* kw) {
    if (!at_ident(kw)) fail(std::string("expected '") + kw + "', got " + describe(peek()));
    next();
  }

  Process parse_process(const Program& p) {
    expect_ident("process");
    Token name = expect(Tok::Ident, "process name");
    if (is_keyword(name.text)) throw ParseError("'" + name.text + "' cannot name a process",
                                                name.line, name.col);
    Process proc;
    proc.name = name.text;
    expect_ident("registers");
    while (peek().type == Tok::RegIdent) proc.registers.push_back(next().text);
    expect_ident("begin");
    while (!at_ident("end")) {
      LabeledStmt ls;
      Token lab = expect(Tok::Ident, "statement label");
      if (is_keyword(lab.text))
        throw ParseError("'" + lab.text + "' cannot be used as a label", lab.line, lab.col);
      ls.label = lab.text;
      ls.line = lab.line;
      ls.col = lab.col;
      expect(Tok::Colon, "':' after label");
      ls.stmt = parse_stmt();
      expect(Tok::Semi, "';' after statement");
      proc.stmts.push_back(std::move(ls));
    }
    expect_ident("end");
    (void)p;
    return proc;
  }

  Statement parse_stmt() {
    Statement s;
    const Token& t = peek();
    if (t.type == Tok::Ident && t.text == "fence") {
      next();
      s.kind = StmtKind::Fence;
      return s;
    }
    if (t.type == Tok::Ident && t.text == "ssfence") {
      next();
      s.kind = StmtKind::SSFence;
      return s;
    }
    if (t.type == Tok::Ident && t.text == "llfence") {
      next();
      s.kind = StmtKind::LLFence;
      return s;
    }
    if (t.type == Tok::Ident && t.text == "syncwr") {
      next();
      expect(Tok::Colon, "':' after 'syncwr'");
      s.kind = StmtKind::SyncWr;
      s.var = expect(Tok::Ident, "variable name").text;
      expect(Tok::Assign, "':='");
      s.e0 = parse_expr();
      return s;
    }
    if (t.type == Tok::Ident && t.text == "cas") {
      next();
      expect(Tok::LParen, "'(' after 'cas'");
      s.kind = StmtKind::Cas;
      s.var = expect(Tok::Ident, "variable name").text;
      expect(Tok::Comma, "','");
      s.e0 = parse_expr();
      expect(Tok::Comma, "','");
      s.e1 = parse_expr();
      expect(Tok::RParen, "')'");
      return s;
    }
    if (t.type == Tok::Ident && t.text == "cbranch") {
      next();
      expect(Tok::LParen, "'(' after 'cbranch'");
      s.kind = StmtKind::CBranch;
      s.cond = parse_bexpr();
      expect(Tok::RParen, "')'");
      s.target = expect(Tok::Ident, "branch target label").text;
      return s;
    }
    if (t.type == Tok::RegIdent) {
      Token reg = next();
      expect(Tok::Assign, "':='");
      if (peek().type == Tok::Ident) {
        // A bare identifier on the right is a shared-variable read; arithmetic
        // expressions range over registers and constants only.
        s.kind = StmtKind::Read;
        s.reg = reg.text;
        s.var = next().text;
        return s;
      }
      s.kind = StmtKind::RegAssign;
      s.reg = reg.text;
      s.e0 = parse_expr();
      return s;
    }
    if (t.type == Tok::Ident) {
      if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'");
      s.kind = StmtKind::Write;
      s.var = next().text;
      expect(Tok::Assign, "':=' in write");
      s.e0 = parse_expr();
      return s;
    }
    fail("expected a statement, got " + describe(t));
  }

  std::shared_ptr<const Expr> parse_expr() {
    auto e = parse_term();
    while (peek().type == Tok::Plus || peek().type == Tok::Minus) {
      auto k = next().type == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      e = Expr::binary(k, std::move(e), parse_term());
    }
    return e;
  }

  std::shared_ptr<const Expr> parse_term() {
    const Token& t = peek();
    if (t.type == Tok::Int) {
      Token v = next();
      max_literal_ = std::max(max_literal_, (Value)v.value);
      return Expr::constant((Value)v.value);
    }
    if (t.type == Tok::RegIdent) {
      Token r = next();
      return Expr::regref(r.text, -1);  // index resolved after the process is complete
    }
    if (t.type == Tok::LParen) {
      next();
      auto e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    fail("expected a register, constant or '(', got " + describe(t));
  }

  // bexpr := band ('||' band)* ; band := bfactor ('&&' bfactor)*
  // bfactor := '!' bfactor | comparison | '(' bexpr ')'
  // A leading '(' is ambiguous (boolean grouping vs. parenthesized arithmetic
  // operand); resolved by trying the boolean reading first and backtracking.
  std::shared_ptr<const BExpr> parse_bexpr() {
    auto e = parse_band();
    while (peek().type == Tok::OrOr) {
      next();
      e = BExpr::logical(BExpr::Kind::Or, std::move(e), parse_band());
    }
    return e;
  }

  std::shared_ptr<const BExpr> parse_band() {
    auto e = parse_bfactor();
    while (peek().type == Tok::AndAnd) {
      next();
      e = BExpr::logical(BExpr::Kind::And, std::move(e), parse_bfactor());
    }
    return e;
  }

  std::shared_ptr<const BExpr> parse_bfactor() {
    if (peek().type == Tok::Bang) {
      next();
      return BExpr::logical(BExpr::Kind::Not, parse_bfactor(), nullptr);
    }
    if (peek().type == Tok::LParen) {
      size_t save = pos_;
      Value save_lit = max_literal_;
      next();
      try {
        auto inner = parse_bexpr();
        expect(Tok::RParen, "')'");
        Tok after = peek().type;
        if (after != Tok::Eq && after != Tok::Ne && after != Tok::Lt && after != Tok::Plus &&
            after != Tok::Minus)
          return inner;
      } catch (const ParseError&) {
      }
      pos_ = save;  // '(' opened an arithmetic operand after all
      max_literal_ = save_lit;
    }
    return parse_comparison();
  }

  std::shared_ptr<const BExpr> parse_comparison() {
    auto a = parse_expr();
    Tok op = peek().type;
    if (op != Tok::Eq && op != Tok::Ne && op != Tok::Lt)
      fail("expected '=', '!=' or '<', got " + describe(peek()));
    next();
    auto b = parse_expr();
    auto k = op == Tok::Eq ? BExpr::Kind::Eq : op == Tok::Ne ? BExpr::Kind::Ne : BExpr::Kind::Lt;
    return BExpr::compare(k, std::move(a), std::move(b));
  }

};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).run(); }

}  // namespace sisdmc
