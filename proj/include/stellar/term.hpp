#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stellar {

/// Interned symbol name.  Interning is process-wide and thread-safe; arities
/// are tracked separately by Signature so that independent programs may use
/// the same name with different arities.
using SymbolId = std::uint32_t;

SymbolId intern(std::string_view name);
const std::string& symbol_name(SymbolId id);

/// Names of the binary list constructors used by the encodings.
namespace ops {
inline constexpr std::string_view cons = "\xC2\xB7";       // '·' right-associative
inline constexpr std::string_view left_cons = "\xE2\x80\xA2";  // '•' left-associative
inline constexpr std::string_view right_cons = "\xE2\x88\x98"; // '∘' right-associative
}  // namespace ops

enum class Polarity : std::uint8_t { none = 0, plus = 1, minus = 2 };

Polarity opposite(Polarity p);

/// A variable: a name plus a renaming scope.  Scope 0 is the name as written;
/// other scopes are produced by renaming apart (diagram vertices, fresh copies).
struct Var {
  SymbolId name = 0;
  std::uint32_t scope = 0;

  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var&, const Var&) = default;
};

struct VarHash {
  std::size_t operator()(const Var& v) const noexcept {
    return (static_cast<std::size_t>(v.name) << 32) ^ v.scope;
  }
};

namespace detail {
struct Node;
}

/// Immutable first-order term over a coloured signature.  A ray is a term.
/// Copies share structure; all operations are pure.
class Term {
 public:
  Term() = default;

  static Term variable(Var v);
  static Term variable(std::string_view name, std::uint32_t scope = 0);
  static Term application(SymbolId symbol, Polarity polarity, std::vector<Term> args);
  static Term application(std::string_view symbol, std::vector<Term> args = {},
                          Polarity polarity = Polarity::none);
  static Term constant(std::string_view symbol) { return application(symbol); }

  bool valid() const { return node_ != nullptr; }
  bool is_variable() const;
  const Var& var() const;
  SymbolId symbol() const;
  Polarity polarity() const;
  const std::vector<Term>& args() const;
  std::size_t arity() const { return args().size(); }

  bool is_ground() const;
  /// Some colour symbol occurs anywhere in the term.
  bool is_coloured() const;
  /// The head is coloured and no other colour occurs.
  bool is_prefix_coloured() const;
  /// Number of function-symbol occurrences.
  std::size_t size() const;
  /// Number of levels: a variable or a constant has depth 1.
  std::size_t depth() const;
  std::size_t hash() const;

  std::string to_string() const;

  /// Identity of the shared node (used to short-circuit substitutions).
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

std::ostream& operator<<(std::ostream& os, const Term& t);

/// Convenience constructors for the list operators.
Term cons(Term head, Term tail);        // head · tail
Term left_cons(Term init, Term last);   // init • last
Term right_cons(Term first, Term rest); // first ∘ rest

/// Set of active colours given by base names.  An empty optional means "all".
class ColourSet {
 public:
  static ColourSet all() { return ColourSet{}; }
  static ColourSet of(std::initializer_list<std::string_view> names);
  static ColourSet of(const std::vector<std::string>& names);

  bool contains(SymbolId base) const { return !bases_ || bases_->count(base) != 0; }
  bool is_all() const { return !bases_.has_value(); }
  const std::optional<std::set<SymbolId>>& bases() const { return bases_; }
  ColourSet unite(const ColourSet& other) const;
  std::string to_string() const;

 private:
  std::optional<std::set<SymbolId>> bases_;
};

/// ⌊r⌋: every colour replaced by its base symbol.
Term underlying(const Term& r);
/// op(r): every colour polarity inverted.
Term opposite(const Term& r);
/// At least one colour of the set occurs anywhere in r.
bool has_colour_in(const Term& r, const ColourSet& colours);
/// Base symbols of the colours occurring in r.
std::set<SymbolId> colours_of(const Term& r);

/// Variables in order of first occurrence (left to right, depth first).
std::vector<Var> variables(const Term& t);
void collect_variables(const Term& t, std::vector<Var>& out);
bool occurs(const Var& v, const Term& t);
std::size_t occurrences(const Var& v, const Term& t);
/// Largest renaming scope used in t (0 when none).
std::uint32_t max_scope(const Term& t);
/// Replace the scope of every variable.
Term with_scope(const Term& t, std::uint32_t scope);

/// Human-readable variable rendering (scope suffix when non-zero).
std::string var_to_string(const Var& v);

/// Natural number encodings: 0, s(0), s(s(0)), ...
Term encode_nat(unsigned n);
/// Inverse of encode_nat when t is an s-tower over 0.
std::optional<unsigned> decode_nat(const Term& t);

}  // namespace stellar
