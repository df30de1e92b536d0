#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stellar/term.hpp"

namespace stellar {

/// Finite map from variables to terms.
class Substitution {
 public:
  Substitution() = default;

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const Term* find(const Var& v) const;
  /// Adds or replaces a binding; identity bindings are dropped.
  void bind(const Var& v, Term t);

  Term apply(const Term& t) const;
  std::vector<Term> apply(const std::vector<Term>& ts) const;

  /// Bindings sorted by variable for stable printing and comparison.
  std::vector<std::pair<Var, Term>> bindings() const;
  std::vector<Var> domain() const;
  bool is_idempotent() const;
  std::string to_string() const;

  /// this := {x ↦ t} ∘ this, then x ↦ t is added (one elimination step).
  void eliminate(const Var& x, const Term& t);

  friend bool operator==(const Substitution& a, const Substitution& b);
  friend Substitution compose(const Substitution& first, const Substitution& second);

 private:
  std::unordered_map<Var, Term, VarHash> map_;
};

/// (first ∘ second)(t) = first(second(t)).
Substitution compose(const Substitution& first, const Substitution& second);

/// Renaming that maps every variable in ts to the same name in `scope`.
Term rename_apart(const Term& t, std::uint32_t scope);

struct Equation {
  Term lhs;
  Term rhs;
};
using UnificationProblem = std::vector<Equation>;

enum class FailureKind { symbol_clash, arity_clash, occurs_check };

/// Why a unification problem has no solution; a value, never an abort.
struct Failure {
  FailureKind kind;
  Term lhs;
  Term rhs;

  std::string describe() const;
};

/// Rule-selection order for the Martelli-Montanari loop.  The solved form is
/// unique up to renaming whatever the order.
enum class SelectionOrder { fifo, lifo, shuffled };

struct SolveOptions {
  SelectionOrder order = SelectionOrder::fifo;
  std::uint64_t seed = 0;
};

class SolveResult {
 public:
  static SolveResult success(Substitution s) { return SolveResult(std::move(s)); }
  static SolveResult failure(Failure f) { return SolveResult(std::move(f)); }

  bool ok() const { return unifier_.has_value(); }
  explicit operator bool() const { return ok(); }
  const Substitution& unifier() const { return *unifier_; }
  const Failure& failure() const { return *failure_; }

 private:
  explicit SolveResult(Substitution s) : unifier_(std::move(s)) {}
  explicit SolveResult(Failure f) : failure_(std::move(f)) {}
  std::optional<Substitution> unifier_;
  std::optional<Failure> failure_;
};

/// Martelli-Montanari unification with occurs check.  Colours are compared as
/// ordinary symbols (callers strip them first when unifying underlying terms).
SolveResult solve(const UnificationProblem& problem, const SolveOptions& options = {});
SolveResult unify(const Term& a, const Term& b);

/// r1 ⋈_A r2: both rays carry a colour of A and r1 unifies with op(r2) once
/// r2 has been renamed apart from r1.
bool matchable(const Term& r1, const Term& r2, const ColourSet& colours);

using Clause = std::vector<Term>;

class ResolveResult {
 public:
  static ResolveResult success(Clause c) { return ResolveResult(std::move(c), std::nullopt); }
  static ResolveResult failure(Failure f) { return ResolveResult(std::nullopt, std::move(f)); }
  bool ok() const { return clause_.has_value(); }
  const Clause& clause() const { return *clause_; }
  const Failure& failure() const { return *failure_; }

 private:
  ResolveResult(std::optional<Clause> c, std::optional<Failure> f)
      : clause_(std::move(c)), failure_(std::move(f)) {}
  std::optional<Clause> clause_;
  std::optional<Failure> failure_;
};

/// Binary resolution on atom i of c and atom j of d.  The atoms must carry
/// opposite polarities on the same predicate (std::invalid_argument otherwise).
ResolveResult resolve(const Clause& c, const Clause& d, std::size_t i, std::size_t j);

}  // namespace stellar
