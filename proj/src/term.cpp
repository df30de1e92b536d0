#include "stellar/term.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace stellar {

namespace {

class Interner {
 public:
  SymbolId intern(std::string_view name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = index_.emplace(std::string(name), static_cast<SymbolId>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
  }

  const std::string& name(SymbolId id) {
    std::shared_lock lock(mutex_);
    if (id >= names_.size()) throw std::out_of_range("unknown symbol id");
    return names_[id];
  }

 private:
  std::shared_mutex mutex_;
  // deque keeps references stable across growth
  std::deque<std::string> names_;
  std::unordered_map<std::string, SymbolId> index_;
};

Interner& interner() {
  static Interner instance;
  return instance;
}

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

SymbolId intern(std::string_view name) { return interner().intern(name); }
const std::string& symbol_name(SymbolId id) { return interner().name(id); }

Polarity opposite(Polarity p) {
  switch (p) {
    case Polarity::plus: return Polarity::minus;
    case Polarity::minus: return Polarity::plus;
    default: return Polarity::none;
  }
}

namespace detail {
struct Node {
  bool is_var = false;
  Var var;
  SymbolId symbol = 0;
  Polarity polarity = Polarity::none;
  std::vector<Term> args;
  std::size_t hash = 0;
  std::size_t size = 0;
  std::size_t depth = 1;
  bool ground = true;
  bool coloured = false;
};
}  // namespace detail

Term Term::variable(Var v) {
  auto n = std::make_shared<detail::Node>();
  n->is_var = true;
  n->var = v;
  n->hash = mix(mix(0x51ed27, v.name), v.scope);
  n->ground = false;
  return Term(std::move(n));
}

Term Term::variable(std::string_view name, std::uint32_t scope) {
  return variable(Var{intern(name), scope});
}

Term Term::application(SymbolId symbol, Polarity polarity, std::vector<Term> args) {
  auto n = std::make_shared<detail::Node>();
  n->symbol = symbol;
  n->polarity = polarity;
  std::size_t h = mix(mix(0xa11ce, symbol), static_cast<std::size_t>(polarity));
  std::size_t size = 1;
  std::size_t depth = 1;
  bool ground = true;
  bool coloured = polarity != Polarity::none;
  for (const auto& a : args) {
    if (!a.valid()) throw std::invalid_argument("invalid subterm");
    h = mix(h, a.hash());
    size += a.size();
    depth = std::max(depth, a.depth() + 1);
    ground = ground && a.is_ground();
    coloured = coloured || a.is_coloured();
  }
  n->args = std::move(args);
  n->hash = mix(h, n->args.size());
  n->size = size;
  n->depth = depth;
  n->ground = ground;
  n->coloured = coloured;
  return Term(std::move(n));
}

Term Term::application(std::string_view symbol, std::vector<Term> args, Polarity polarity) {
  return application(intern(symbol), polarity, std::move(args));
}

bool Term::is_variable() const { return node_->is_var; }
const Var& Term::var() const {
  if (!node_->is_var) throw std::logic_error("term is not a variable");
  return node_->var;
}
SymbolId Term::symbol() const { return node_->symbol; }
Polarity Term::polarity() const { return node_->polarity; }
const std::vector<Term>& Term::args() const { return node_->args; }
bool Term::is_ground() const { return node_->ground; }
bool Term::is_coloured() const { return node_->coloured; }
std::size_t Term::size() const { return node_->size; }
std::size_t Term::depth() const { return node_->depth; }
std::size_t Term::hash() const { return node_->hash; }

bool Term::is_prefix_coloured() const {
  if (node_->is_var || node_->polarity == Polarity::none) return false;
  return std::none_of(node_->args.begin(), node_->args.end(),
                      [](const Term& a) { return a.is_coloured(); });
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash()) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.is_var != y.is_var) return false;
  if (x.is_var) return x.var == y.var;
  return x.symbol == y.symbol && x.polarity == y.polarity && x.args == y.args;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  // variables sort before applications
  if (x.is_var != y.is_var) return x.is_var ? std::strong_ordering::less : std::strong_ordering::greater;
  if (x.is_var) {
    if (auto c = symbol_name(x.var.name) <=> symbol_name(y.var.name); c != 0) return c;
    return x.var.scope <=> y.var.scope;
  }
  if (auto c = symbol_name(x.symbol) <=> symbol_name(y.symbol); c != 0) return c;
  if (auto c = x.polarity <=> y.polarity; c != 0) return c;
  if (auto c = x.args.size() <=> y.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (auto c = x.args[i] <=> y.args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string var_to_string(const Var& v) {
  if (v.scope == 0) return symbol_name(v.name);
  return symbol_name(v.name) + "_" + std::to_string(v.scope);
}

namespace {

enum class Assoc { none, left, right };

Assoc infix_assoc(const Term& t) {
  if (t.is_variable() || t.arity() != 2 || t.polarity() != Polarity::none) return Assoc::none;
  const auto& name = symbol_name(t.symbol());
  if (name == ops::cons || name == ops::right_cons) return Assoc::right;
  if (name == ops::left_cons) return Assoc::left;
  return Assoc::none;
}

void print(std::ostream& os, const Term& t) {
  if (t.is_variable()) {
    os << var_to_string(t.var());
    return;
  }
  const Assoc assoc = infix_assoc(t);
  if (assoc != Assoc::none) {
    const auto& lhs = t.args()[0];
    const auto& rhs = t.args()[1];
    const bool same_l = !lhs.is_variable() && lhs.symbol() == t.symbol() && infix_assoc(lhs) != Assoc::none;
    const bool same_r = !rhs.is_variable() && rhs.symbol() == t.symbol() && infix_assoc(rhs) != Assoc::none;
    const bool paren_l = infix_assoc(lhs) != Assoc::none && !(same_l && assoc == Assoc::left);
    const bool paren_r = infix_assoc(rhs) != Assoc::none && !(same_r && assoc == Assoc::right);
    if (paren_l) os << '(';
    print(os, lhs);
    if (paren_l) os << ')';
    os << symbol_name(t.symbol());
    if (paren_r) os << '(';
    print(os, rhs);
    if (paren_r) os << ')';
    return;
  }
  if (t.polarity() == Polarity::plus) os << '+';
  if (t.polarity() == Polarity::minus) os << '-';
  os << symbol_name(t.symbol());
  if (t.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) os << ", ";
    print(os, t.args()[i]);
  }
  os << ')';
}

}  // namespace

std::string Term::to_string() const {
  std::ostringstream os;
  print(os, *this);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print(os, t);
  return os;
}

Term cons(Term head, Term tail) {
  return Term::application(ops::cons, {std::move(head), std::move(tail)});
}
Term left_cons(Term init, Term last) {
  return Term::application(ops::left_cons, {std::move(init), std::move(last)});
}
Term right_cons(Term first, Term rest) {
  return Term::application(ops::right_cons, {std::move(first), std::move(rest)});
}

ColourSet ColourSet::of(std::initializer_list<std::string_view> names) {
  ColourSet s;
  s.bases_.emplace();
  for (auto n : names) s.bases_->insert(intern(n));
  return s;
}

ColourSet ColourSet::of(const std::vector<std::string>& names) {
  ColourSet s;
  s.bases_.emplace();
  for (const auto& n : names) s.bases_->insert(intern(n));
  return s;
}

ColourSet ColourSet::unite(const ColourSet& other) const {
  if (is_all() || other.is_all()) return all();
  ColourSet s = *this;
  s.bases_->insert(other.bases_->begin(), other.bases_->end());
  return s;
}

std::string ColourSet::to_string() const {
  if (is_all()) return "*";
  std::vector<std::string> names;
  for (auto id : *bases_) names.push_back(symbol_name(id));
  std::sort(names.begin(), names.end());
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ",";
    out += n;
  }
  return out;
}

namespace {

template <typename F>
Term map_heads(const Term& r, F&& f) {
  if (r.is_variable() || !r.is_coloured()) return r;
  std::vector<Term> args;
  args.reserve(r.arity());
  for (const auto& a : r.args()) args.push_back(map_heads(a, f));
  return Term::application(r.symbol(), f(r.polarity()), std::move(args));
}

}  // namespace

Term underlying(const Term& r) {
  return map_heads(r, [](Polarity) { return Polarity::none; });
}

Term opposite(const Term& r) {
  return map_heads(r, [](Polarity p) { return opposite(p); });
}

bool has_colour_in(const Term& r, const ColourSet& colours) {
  if (r.is_variable() || !r.is_coloured()) return false;
  if (r.polarity() != Polarity::none && colours.contains(r.symbol())) return true;
  return std::any_of(r.args().begin(), r.args().end(),
                     [&](const Term& a) { return has_colour_in(a, colours); });
}

namespace {
void collect_colours(const Term& r, std::set<SymbolId>& out) {
  if (r.is_variable() || !r.is_coloured()) return;
  if (r.polarity() != Polarity::none) out.insert(r.symbol());
  for (const auto& a : r.args()) collect_colours(a, out);
}
}  // namespace

std::set<SymbolId> colours_of(const Term& r) {
  std::set<SymbolId> out;
  collect_colours(r, out);
  return out;
}

void collect_variables(const Term& t, std::vector<Var>& out) {
  if (t.is_ground()) return;
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.var()) == out.end()) out.push_back(t.var());
    return;
  }
  for (const auto& a : t.args()) collect_variables(a, out);
}

std::vector<Var> variables(const Term& t) {
  std::vector<Var> out;
  collect_variables(t, out);
  return out;
}

bool occurs(const Var& v, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_variable()) return t.var() == v;
  return std::any_of(t.args().begin(), t.args().end(), [&](const Term& a) { return occurs(v, a); });
}

std::size_t occurrences(const Var& v, const Term& t) {
  if (t.is_ground()) return 0;
  if (t.is_variable()) return t.var() == v ? 1 : 0;
  std::size_t n = 0;
  for (const auto& a : t.args()) n += occurrences(v, a);
  return n;
}

std::uint32_t max_scope(const Term& t) {
  if (t.is_ground()) return 0;
  if (t.is_variable()) return t.var().scope;
  std::uint32_t m = 0;
  for (const auto& a : t.args()) m = std::max(m, max_scope(a));
  return m;
}

Term with_scope(const Term& t, std::uint32_t scope) {
  if (t.is_ground()) return t;
  if (t.is_variable()) return Term::variable(Var{t.var().name, scope});
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(with_scope(a, scope));
  return Term::application(t.symbol(), t.polarity(), std::move(args));
}

Term encode_nat(unsigned n) {
  Term t = Term::constant("0");
  for (unsigned i = 0; i < n; ++i) t = Term::application("s", {t});
  return t;
}

std::optional<unsigned> decode_nat(const Term& t) {
  static const SymbolId zero = intern("0");
  static const SymbolId succ = intern("s");
  unsigned n = 0;
  const Term* cur = &t;
  while (true) {
    if (cur->is_variable() || cur->polarity() != Polarity::none) return std::nullopt;
    if (cur->symbol() == zero && cur->arity() == 0) return n;
    if (cur->symbol() != succ || cur->arity() != 1) return std::nullopt;
    ++n;
    cur = &cur->args()[0];
  }
}

}  // namespace stellar
