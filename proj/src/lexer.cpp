#include "lexer.hpp"

#include <cctype>

#include "sisdmc/lang.hpp"

namespace sisdmc::detail {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::RegIdent: return "register";
    case Tok::Int: return "integer";
    case Tok::Assign: return "':='";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Eq: return "'='";
    case Tok::Star: return "'*'";
    case Tok::Comma: return "','";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::Dot: return "'.'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text, bool dot_in_ident) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto bump = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  auto is_ident_char = [&](char c) {
    return std::isalnum((unsigned char)c) || c == '_' || (dot_in_ident && c == '.');
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') bump(1);
      continue;
    }
    if (std::isspace((unsigned char)c)) {
      bump(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < text.size() && std::isdigit((unsigned char)text[j])) ++j;
      t.type = Tok::Int;
      t.text = std::string(text.substr(i, j - i));
      t.value = std::stol(t.text);
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '$') {
      size_t j = i + 1;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      if (j == i + 1) throw ParseError("'$' must start a register name", line, col);
      t.type = Tok::RegIdent;
      t.text = std::string(text.substr(i, j - i));
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      t.type = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
      bump(j - i);
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < text.size() && text[i + 1] == b;
    };
    if (two(':', '=')) {
      t.type = Tok::Assign;
      bump(2);
    } else if (two('!', '=')) {
      t.type = Tok::Ne;
      bump(2);
    } else if (two('&', '&')) {
      t.type = Tok::AndAnd;
      bump(2);
    } else if (two('|', '|')) {
      t.type = Tok::OrOr;
      bump(2);
    } else {
      switch (c) {
        case ':': t.type = Tok::Colon; break;
        case ';': t.type = Tok::Semi; break;
        case '=': t.type = Tok::Eq; break;
        case '*': t.type = Tok::Star; break;
        case ',': t.type = Tok::Comma; break;
        case '(': t.type = Tok::LParen; break;
        case ')': t.type = Tok::RParen; break;
        case '+': t.type = Tok::Plus; break;
        case '-': t.type = Tok::Minus; break;
        case '<': t.type = Tok::Lt; break;
        case '!': t.type = Tok::Bang; break;
        case '.': t.type = Tok::Dot; break;
        case '{': t.type = Tok::LBrace; break;
        case '}': t.type = Tok::RBrace; break;
        default:
          throw ParseError(std::string("stray character '") + c + "'", line, col);
      }
      bump(1);
    }
    out.push_back(std::move(t));
  }
  Token eof;
  eof.type = Tok::End;
  eof.line = line;
  eof.col = col;
  out.push_back(std::move(eof));
  return out;
}

}  // namespace sisdmc::detail
