#include "stellar/unify.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stellar {

const Term* Substitution::find(const Var& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

void Substitution::bind(const Var& v, Term t) {
  if (t.is_variable() && t.var() == v) {
    map_.erase(v);
    return;
  }
  map_.insert_or_assign(v, std::move(t));
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty() || t.is_ground()) return t;
  if (t.is_variable()) {
    const Term* bound = find(t.var());
    return bound ? *bound : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply(a));
    changed = changed || args.back().identity() != a.identity();
  }
  if (!changed) return t;
  return Term::application(t.symbol(), t.polarity(), std::move(args));
}

std::vector<Term> Substitution::apply(const std::vector<Term>& ts) const {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(apply(t));
  return out;
}

std::vector<std::pair<Var, Term>> Substitution::bindings() const {
  std::vector<std::pair<Var, Term>> out(map_.begin(), map_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return Term::variable(a.first) < Term::variable(b.first);
  });
  return out;
}

std::vector<Var> Substitution::domain() const {
  std::vector<Var> out;
  for (const auto& [v, _] : bindings()) out.push_back(v);
  return out;
}

bool Substitution::is_idempotent() const {
  for (const auto& [v, t] : map_) {
    for (const auto& w : variables(t)) {
      if (map_.count(w)) return false;
    }
  }
  return true;
}

std::string Substitution::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [v, t] : bindings()) {
    if (!first) os << ", ";
    first = false;
    os << var_to_string(v) << " \xE2\x86\xA6 " << t;
  }
  os << '}';
  return os.str();
}

bool operator==(const Substitution& a, const Substitution& b) { return a.map_ == b.map_; }

Substitution compose(const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& [v, t] : second.map_) out.bind(v, first.apply(t));
  for (const auto& [v, t] : first.map_) {
    if (!second.find(v)) out.bind(v, t);
  }
  return out;
}

void Substitution::eliminate(const Var& x, const Term& t) {
  Substitution single;
  single.bind(x, t);
  for (auto it = map_.begin(); it != map_.end();) {
    it->second = single.apply(it->second);
    if (it->second.is_variable() && it->second.var() == it->first) {
      it = map_.erase(it);
    } else {
      ++it;
    }
  }
  bind(x, t);
}

Term rename_apart(const Term& t, std::uint32_t scope) { return with_scope(t, scope); }

std::string Failure::describe() const {
  std::ostringstream os;
  switch (kind) {
    case FailureKind::symbol_clash: os << "symbol clash: "; break;
    case FailureKind::arity_clash: os << "arity clash: "; break;
    case FailureKind::occurs_check: os << "occurs check: "; break;
  }
  os << lhs << " \xE2\x89\x90 " << rhs;
  return os.str();
}

namespace {

/// Worklist state of the Martelli-Montanari algorithm.  Solved equations are
/// kept as a substitution; eliminating a variable rewrites both the pending
/// equations and the solved part.
class Solver {
 public:
  explicit Solver(const SolveOptions& options) : options_(options) {}

  SolveResult run(const UnificationProblem& problem) {
    for (const auto& eq : problem) pending_.push_back(eq);
    while (!pending_.empty()) {
      Equation eq = select();
      if (auto failure = step(std::move(eq))) return SolveResult::failure(*failure);
    }
    return SolveResult::success(std::move(solved_));
  }

 private:
  Equation select() {
    std::size_t index = 0;
    switch (options_.order) {
      case SelectionOrder::fifo: index = 0; break;
      case SelectionOrder::lifo: index = pending_.size() - 1; break;
      case SelectionOrder::shuffled:
        if (!rng_) rng_.emplace(options_.seed);
        index = std::uniform_int_distribution<std::size_t>(0, pending_.size() - 1)(*rng_);
        break;
    }
    Equation eq = std::move(pending_[index]);
    pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(index));
    return eq;
  }

  std::optional<Failure> step(Equation eq) {
    const Term& s = eq.lhs;
    const Term& t = eq.rhs;
    if (s == t) return std::nullopt;  // delete
    if (!s.is_variable() && t.is_variable()) {  // swap
      pending_.push_back(Equation{t, s});
      return std::nullopt;
    }
    if (!s.is_variable()) {
      if (s.symbol() != t.symbol() || s.polarity() != t.polarity()) {
        return Failure{FailureKind::symbol_clash, s, t};
      }
      if (s.arity() != t.arity()) return Failure{FailureKind::arity_clash, s, t};
      for (std::size_t i = 0; i < s.arity(); ++i) {  // decompose
        pending_.push_back(Equation{s.args()[i], t.args()[i]});
      }
      return std::nullopt;
    }
    const Var x = s.var();
    if (occurs(x, t)) return Failure{FailureKind::occurs_check, s, t};
    // eliminate
    Substitution single;
    single.bind(x, t);
    for (auto& e : pending_) {
      e.lhs = single.apply(e.lhs);
      e.rhs = single.apply(e.rhs);
    }
    solved_.eliminate(x, t);
    return std::nullopt;
  }

  SolveOptions options_;
  std::optional<std::mt19937_64> rng_;  // seeded on first use
  std::vector<Equation> pending_;
  Substitution solved_;
};

}  // namespace

SolveResult solve(const UnificationProblem& problem, const SolveOptions& options) {
  Solver solver(options);
  return solver.run(problem);
}

SolveResult unify(const Term& a, const Term& b) { return solve({Equation{a, b}}); }

bool matchable(const Term& r1, const Term& r2, const ColourSet& colours) {
  if (!has_colour_in(r1, colours) || !has_colour_in(r2, colours)) return false;
  const Term renamed = rename_apart(r2, max_scope(r1) + 1);
  return unify(r1, opposite(renamed)).ok();
}

ResolveResult resolve(const Clause& c, const Clause& d, std::size_t i, std::size_t j) {
  if (i >= c.size() || j >= d.size()) throw std::invalid_argument("resolve: atom index out of range");
  const Term& a = c[i];
  if (a.is_variable() || d[j].is_variable()) throw std::invalid_argument("resolve: atoms must be predicates");
  const std::uint32_t fresh = std::max(max_scope(a), [&] {
    std::uint32_t m = 0;
    for (const auto& r : c) m = std::max(m, max_scope(r));
    return m;
  }()) + 1;
  Clause renamed;
  renamed.reserve(d.size());
  for (const auto& r : d) renamed.push_back(rename_apart(r, fresh));
  const Term& b = renamed[j];
  if (a.polarity() == Polarity::none || a.polarity() != opposite(b.polarity()) || a.symbol() != b.symbol()) {
    throw std::invalid_argument("resolve: atoms need opposite polarities on the same predicate");
  }
  auto result = unify(underlying(a), underlying(b));
  if (!result.ok()) return ResolveResult::failure(result.failure());
  Clause out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k != i) out.push_back(result.unifier().apply(c[k]));
  }
  for (std::size_t k = 0; k < renamed.size(); ++k) {
    if (k != j) out.push_back(result.unifier().apply(renamed[k]));
  }
  return ResolveResult::success(std::move(out));
}

}  // namespace stellar
