#pragma once

// Internal tokenizer shared by the program and property parsers.  Not part of
// the public headers.

#include <string>
#include <string_view>
#include <vector>

namespace sisdmc::detail {

enum class Tok {
  Ident,     // plain identifier (variable, label, pid, keyword)
  RegIdent,  // '$'-prefixed identifier
  Int,
  Assign,  // :=
  Colon,
  Semi,
  Eq,
  Star,
  Comma,
  LParen,
  RParen,
  Plus,
  Minus,
  Ne,  // !=
  Lt,
  AndAnd,
  OrOr,
  Bang,
  Dot,
  LBrace,
  RBrace,
  End,
};

struct Token {
  Tok type;
  std::string text;
  long value = 0;
  int line = 1, col = 1;
};

// '#' starts a comment running to end of line.  With dot_in_ident, '.' is
// folded into identifiers (program labels like "L1.f2"); without it, '.' is
// its own token (property atoms like "P1.$r2").
std::vector<Token> lex(std::string_view text, bool dot_in_ident);

const char* tok_name(Tok t);

}  // namespace sisdmc::detail
