#pragma once

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "partab/formula.hpp"

namespace partab {

/// Syntax error with a 1-based character position into the input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Concrete syntax
//
//   expr  := or
//   or    := and ('|' and)*          left-associative
//   and   := until ('&' until)*      left-associative
//   until := unary ('U' until)?      right-associative
//   unary := ('~'|'X'|'F'|'G') unary | atom | '(' expr ')'
//
// Unary operators bind tightest, then U, then &, then |.  The uppercase
// letters X, F, G and U are always operators and never part of an atom
// name, so "XXq" reads as X(X(q)) and "pUq" as p U q.  Atom names are
// ASCII identifiers over the remaining letters, digits and '_'.

namespace detail {

inline bool ident_start(char c) {
  if (c == 'X' || c == 'F' || c == 'G' || c == 'U') return false;
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

inline bool ident_cont(char c) {
  if (c == 'X' || c == 'F' || c == 'G' || c == 'U') return false;
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_ + 1, "empty input");
    Formula f = parse_or();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError(pos_ + 1, std::string("unexpected '") + text_[pos_] + "'");
    return f;
  }

 private:
  Formula parse_or() {
    Formula f = parse_and();
    while (peek() == '|') {
      ++pos_;
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (peek() == '&') {
      ++pos_;
      f = Formula::conj(f, parse_until());
    }
    return f;
  }

  Formula parse_until() {
    Formula f = parse_unary();
    if (peek() == 'U') {
      ++pos_;
      return Formula::until(f, parse_until());
    }
    return f;
  }

  Formula parse_unary() {
    char c = peek();
    switch (c) {
      case '~':
        ++pos_;
        return Formula::negation(parse_unary());
      case 'X':
        ++pos_;
        return Formula::next(parse_unary());
      case 'F':
        ++pos_;
        return Formula::eventually(parse_unary());
      case 'G':
        ++pos_;
        return Formula::always(parse_unary());
      case '(': {
        std::size_t open = pos_ + 1;
        ++pos_;
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(open, "unbalanced parenthesis");
        Formula f = parse_or();
        if (peek() != ')') throw ParseError(open, "unbalanced parenthesis");
        ++pos_;
        return f;
      }
      default:
        break;
    }
    if (pos_ >= text_.size()) throw ParseError(pos_ + 1, "expected a formula");
    if (!ident_start(c))
      throw ParseError(pos_ + 1, std::string("unexpected '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_cont(text_[pos_])) ++pos_;
    return Formula::atom(std::string(text_.substr(start, pos_ - start)));
  }

  // Returns the next non-space character without consuming it, or '\0'.
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Precedence levels for the renderer; higher binds tighter.
inline int render_level(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Or:
      return 1;
    case Formula::Kind::And:
      return 2;
    case Formula::Kind::Until:
    case Formula::Kind::Release:
      return 3;
    default:
      return 4;  // unary operators and atoms
  }
}

inline void render_into(const Formula& f, int min_level, std::ostream& out) {
  int level = render_level(f.kind());
  bool parens = level < min_level;
  if (parens) out << '(';
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out << f.name();
      break;
    case Formula::Kind::Not:
      out << '~';
      render_into(f.child(), 4, out);
      break;
    case Formula::Kind::Next:
      out << 'X';
      render_into(f.child(), 4, out);
      break;
    case Formula::Kind::Eventually:
      out << 'F';
      render_into(f.child(), 4, out);
      break;
    case Formula::Kind::Always:
      out << 'G';
      render_into(f.child(), 4, out);
      break;
    case Formula::Kind::And:
      render_into(f.left(), 2, out);
      out << " & ";
      render_into(f.right(), 3, out);
      break;
    case Formula::Kind::Or:
      render_into(f.left(), 1, out);
      out << " | ";
      render_into(f.right(), 2, out);
      break;
    case Formula::Kind::Until:
      render_into(f.left(), 4, out);
      out << " U ";
      render_into(f.right(), 3, out);
      break;
    case Formula::Kind::Release:
      // Internal operator; rendered for diagnostics, not re-parseable.
      render_into(f.left(), 4, out);
      out << " R ";
      render_into(f.right(), 3, out);
      break;
  }
  if (parens) out << ')';
}

}  // namespace detail

/// Parses the concrete syntax into a Formula.  Throws ParseError on
/// malformed or empty input.
inline Formula parse(std::string_view text) { return detail::Parser(text).run(); }

/// Renders with minimal parentheses under the precedence contract;
/// parse(render(f)) is structurally equal to f for parser-producible
/// formulas (everything without Release).
inline std::string render(const Formula& f) {
  std::ostringstream out;
  detail::render_into(f, 0, out);
  return out.str();
}

}  // namespace partab
