#include "stellar/syntax.hpp"

#include <cctype>
#include <sstream>

namespace stellar {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

bool Signature::declare(SymbolId symbol, std::size_t arity) {
  auto [it, inserted] = arities_.emplace(symbol, arity);
  return inserted || it->second == arity;
}

std::optional<std::size_t> Signature::arity(SymbolId symbol) const {
  auto it = arities_.find(symbol);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

void Signature::declare_all(const Term& t) {
  if (t.is_variable()) return;
  if (!declare(t.symbol(), t.arity())) {
    throw std::invalid_argument("symbol " + symbol_name(t.symbol()) + " used with arity " +
                                std::to_string(t.arity()) + " but declared with arity " +
                                std::to_string(*arity(t.symbol())));
  }
  for (const auto& a : t.args()) declare_all(a);
}

namespace {

constexpr std::string_view blank_glyph = "\xE2\x90\xA3";  // ␣

class Parser {
 public:
  Parser(std::string_view text, Signature& signature) : text_(text), signature_(signature) {}

  Term term() {
    skip();
    Term first = atom();
    skip();
    std::optional<std::string_view> op = peek_operator();
    if (!op) return first;
    std::vector<Term> items{first};
    while (true) {
      skip();
      auto next = peek_operator();
      if (!next) break;
      if (*next != *op) {
        error("operators " + std::string(*op) + " and " + std::string(*next) +
              " cannot be mixed without parentheses");
      }
      consume_operator();
      items.push_back(atom());
    }
    const SymbolId sym = intern(*op);
    if (*op == ops::left_cons) {
      Term acc = items.front();
      for (std::size_t i = 1; i < items.size(); ++i) acc = Term::application(sym, Polarity::none, {acc, items[i]});
      return acc;
    }
    Term acc = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) acc = Term::application(sym, Polarity::none, {items[i], acc});
    return acc;
  }

  Star star() {
    skip();
    expect('[');
    Star s;
    skip();
    if (peek() == ']') {
      advance();
      return s;
    }
    while (true) {
      s.rays.push_back(term());
      skip();
      if (peek() == ',') {
        advance();
        continue;
      }
      expect(']');
      return s;
    }
  }

  Constellation constellation() {
    Constellation phi;
    while (true) {
      skip();
      if (at_end()) return phi;
      phi.stars.push_back(star());
      skip();
      expect(';');
    }
  }

  void finish() {
    skip();
    if (!at_end()) error("unexpected trailing input");
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).substr(0, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && !at_end(); ++i) {
      const unsigned char c = static_cast<unsigned char>(text_[pos_++]);
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column_;  // count code points, not continuation bytes
      }
    }
  }

  void skip() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void error(const std::string& message) const { throw ParseError(message, line_, column_); }

  void expect(char c) {
    if (peek() != c) {
      if (at_end()) error(std::string("expected '") + c + "' but reached end of input");
      error(std::string("expected '") + c + "' but found '" + peek() + "'");
    }
    advance();
  }

  std::optional<std::string_view> peek_operator() const {
    if (starts_with(ops::cons) || peek() == '.') return ops::cons;
    if (starts_with(ops::left_cons) || peek() == '*') return ops::left_cons;
    if (starts_with(ops::right_cons) || peek() == '~') return ops::right_cons;
    return std::nullopt;
  }

  void consume_operator() {
    for (auto op : {ops::cons, ops::left_cons, ops::right_cons}) {
      if (starts_with(op)) {
        advance(op.size());
        return;
      }
    }
    advance();
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string identifier() {
    std::string out;
    while (!at_end() && ident_char(peek())) {
      out += peek();
      advance();
    }
    return out;
  }

  Term atom() {
    skip();
    const std::size_t line = line_;
    const std::size_t col = column_;
    if (at_end()) error("expected a term but reached end of input");
    if (peek() == '(') {
      advance();
      Term t = term();
      skip();
      expect(')');
      return t;
    }
    if (starts_with(blank_glyph)) {
      advance(blank_glyph.size());
      return declared(Term::constant("_"), line, col);
    }
    Polarity polarity = Polarity::none;
    if (peek() == '+' || peek() == '-') {
      polarity = peek() == '+' ? Polarity::plus : Polarity::minus;
      advance();
    }
    const char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (polarity != Polarity::none) error("a variable cannot carry a polarity");
      return Term::variable(identifier());
    }
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
      if (at_end()) error("expected a term but reached end of input");
      error(std::string("unexpected character '") + c + "'");
    }
    const std::string name = identifier();
    std::vector<Term> args;
    skip();
    if (peek() == '(') {
      advance();
      while (true) {
        args.push_back(term());
        skip();
        if (peek() == ',') {
          advance();
          continue;
        }
        expect(')');
        break;
      }
    }
    return declared(Term::application(name, std::move(args), polarity), line, col);
  }

  Term declared(Term t, std::size_t line, std::size_t col) {
    if (!signature_.declare(t.symbol(), t.arity())) {
      throw ParseError("symbol " + symbol_name(t.symbol()) + " used with arity " + std::to_string(t.arity()) +
                           " but earlier with arity " + std::to_string(*signature_.arity(t.symbol())),
                       line, col);
    }
    return t;
  }

  std::string_view text_;
  Signature& signature_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

Term parse_term(std::string_view text, Signature& signature) {
  Parser p(text, signature);
  Term t = p.term();
  p.finish();
  return t;
}

Term parse_term(std::string_view text) {
  Signature signature;
  return parse_term(text, signature);
}

Star parse_star(std::string_view text) {
  Signature signature;
  Parser p(text, signature);
  Star s = p.star();
  p.finish();
  return s;
}

Constellation parse_constellation(std::string_view text, Signature& signature) {
  Parser p(text, signature);
  return p.constellation();
}

Constellation parse_constellation(std::string_view text) {
  Signature signature;
  return parse_constellation(text, signature);
}

std::string print_constellation(const Constellation& phi) {
  std::ostringstream os;
  for (const auto& s : phi.stars) os << s.to_string() << ";\n";
  return os.str();
}

}  // namespace stellar
