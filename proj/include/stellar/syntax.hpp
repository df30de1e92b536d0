#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stellar/constellation.hpp"
#include "stellar/term.hpp"

namespace stellar {

/// Syntax or arity error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  /// Message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Arity table: the arity of a symbol (plain or as a colour base) is fixed at
/// its first use; later uses with another arity are rejected.
class Signature {
 public:
  /// Records or checks the arity; returns false on a mismatch.
  bool declare(SymbolId symbol, std::size_t arity);
  std::optional<std::size_t> arity(SymbolId symbol) const;
  /// Declares every symbol of t; throws std::invalid_argument on a mismatch.
  void declare_all(const Term& t);

 private:
  std::map<SymbolId, std::size_t> arities_;
};

/// Term grammar:
///   term    := chain
///   chain   := atom (op atom)*          one operator kind per chain
///   op      := '·' | '.'  (right-assoc)  |  '•' | '*'  (left-assoc)  |  '∘' | '~'  (right-assoc)
///   atom    := ['+'|'-'] symbol ['(' term (',' term)* ')'] | Variable | '(' term ')' | '␣'
/// Mixing different operators without parentheses is an error.
Term parse_term(std::string_view text);
Term parse_term(std::string_view text, Signature& signature);

/// A star `[r1, ..., rn]` or `[]`.
Star parse_star(std::string_view text);

/// A sequence of stars each terminated by ';'.  '#' starts a line comment.
Constellation parse_constellation(std::string_view text);
Constellation parse_constellation(std::string_view text, Signature& signature);

/// One `[...];` line per star; parse_constellation inverts it up to α.
std::string print_constellation(const Constellation& phi);

}  // namespace stellar
