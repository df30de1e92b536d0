#include "stellar/constellation.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace stellar {

std::string Star::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (i) out += ", ";
    out += rays[i].to_string();
  }
  out += "]";
  return out;
}

std::string Constellation::to_string() const {
  if (stars.empty()) return "\xE2\x88\x85";  // ∅
  std::string out;
  for (std::size_t i = 0; i < stars.size(); ++i) {
    if (i) out += " + ";
    out += stars[i].to_string();
  }
  return out;
}

namespace {

/// Incremental bijective variable renaming between two term families.
struct Bijection {
  std::unordered_map<Var, Var, VarHash> forward;
  std::unordered_map<Var, Var, VarHash> backward;

  bool match(const Term& a, const Term& b) {
    if (a.is_variable() != b.is_variable()) return false;
    if (a.is_variable()) {
      auto f = forward.find(a.var());
      auto g = backward.find(b.var());
      if (f == forward.end() && g == backward.end()) {
        forward.emplace(a.var(), b.var());
        backward.emplace(b.var(), a.var());
        return true;
      }
      return f != forward.end() && g != backward.end() && f->second == b.var() && g->second == a.var();
    }
    if (a.symbol() != b.symbol() || a.polarity() != b.polarity() || a.arity() != b.arity()) return false;
    if (a.is_ground() != b.is_ground() || a.size() != b.size()) return false;
    if (a.is_ground()) return a == b;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (!match(a.args()[i], b.args()[i])) return false;
    }
    return true;
  }
};

/// Shape of a term with variables erased; α-variants share their shape.
std::string shape(const Term& t) {
  if (t.is_variable()) return "_";
  std::string out;
  if (t.polarity() == Polarity::plus) out += '+';
  if (t.polarity() == Polarity::minus) out += '-';
  out += symbol_name(t.symbol());
  if (t.arity()) {
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
      if (i) out += ',';
      out += shape(t.args()[i]);
    }
    out += ')';
  }
  return out;
}

std::vector<std::string> sorted_shapes(const Star& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (const auto& r : s.rays) out.push_back(shape(r));
  std::sort(out.begin(), out.end());
  return out;
}

bool permuted_match(const Star& a, const Star& b, std::size_t i, std::vector<bool>& used,
                    const Bijection& bij) {
  if (i == a.size()) return true;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (used[j]) continue;
    Bijection next = bij;
    if (!next.match(a.rays[i], b.rays[j])) continue;
    used[j] = true;
    if (permuted_match(a, b, i + 1, used, next)) return true;
    used[j] = false;
  }
  return false;
}

}  // namespace

bool alpha_equivalent(const Term& a, const Term& b) {
  Bijection bij;
  return bij.match(a, b);
}

bool alpha_equivalent(const Star& a, const Star& b) {
  if (a.size() != b.size()) return false;
  Bijection bij;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!bij.match(a.rays[i], b.rays[i])) return false;
  }
  return true;
}

bool equivalent_up_to_ray_order(const Star& a, const Star& b) {
  if (a.size() != b.size()) return false;
  if (sorted_shapes(a) != sorted_shapes(b)) return false;
  std::vector<bool> used(b.size(), false);
  return permuted_match(a, b, 0, used, Bijection{});
}

bool equivalent_multisets(const Constellation& a, const Constellation& b) {
  if (a.size() != b.size()) return false;
  // Bucket by a renaming-invariant key, then match greedily inside buckets:
  // equivalence up to ray order is an equivalence relation, so greedy works.
  std::map<std::vector<std::string>, std::vector<const Star*>> buckets;
  for (const auto& s : b.stars) buckets[sorted_shapes(s)].push_back(&s);
  for (const auto& s : a.stars) {
    auto it = buckets.find(sorted_shapes(s));
    if (it == buckets.end()) return false;
    auto& pool = it->second;
    auto found = std::find_if(pool.begin(), pool.end(),
                              [&](const Star* t) { return equivalent_up_to_ray_order(s, *t); });
    if (found == pool.end()) return false;
    pool.erase(found);
  }
  return true;
}

Star normalise_variables(const Star& s) {
  std::vector<Var> order;
  for (const auto& r : s.rays) collect_variables(r, order);
  std::set<std::string> reserved;
  std::unordered_map<Var, Var, VarHash> renaming;
  std::vector<Var> pending;
  for (const auto& v : order) {
    const std::string& base = symbol_name(v.name);
    if (reserved.insert(base).second) {
      renaming.emplace(v, Var{v.name, 0});
    } else {
      pending.push_back(v);
    }
  }
  for (const auto& v : pending) {
    const std::string& base = symbol_name(v.name);
    for (unsigned k = 1;; ++k) {
      std::string candidate = base + std::to_string(k);
      if (reserved.insert(candidate).second) {
        renaming.emplace(v, Var{intern(candidate), 0});
        break;
      }
    }
  }
  Substitution sub;
  for (const auto& [from, to] : renaming) sub.bind(from, Term::variable(to));
  return Star(sub.apply(s.rays));
}

Star canonical_star(const Star& s) { return normalise_variables(s); }

bool canonical_less(const Star& a, const Star& b) {
  return std::lexicographical_compare(a.rays.begin(), a.rays.end(), b.rays.begin(), b.rays.end());
}

Constellation disjoint_union(const Constellation& a, const Constellation& b) {
  Constellation out = a;
  out.stars.insert(out.stars.end(), b.stars.begin(), b.stars.end());
  return out;
}

Constellation colour_wrap(const Constellation& phi, std::string_view colour, Polarity polarity) {
  if (polarity == Polarity::none) throw std::invalid_argument("colour_wrap: polarity required");
  const SymbolId c = intern(colour);
  Constellation out;
  for (const auto& s : phi.stars) {
    Star t;
    for (const auto& r : s.rays) {
      if (r.is_coloured()) throw std::invalid_argument("colour_wrap: ray already coloured: " + r.to_string());
      t.rays.push_back(Term::application(c, polarity, {r}));
    }
    out.stars.push_back(std::move(t));
  }
  return out;
}

namespace {

Term recolour(const Term& r, const std::map<SymbolId, SymbolId>& mu) {
  if (r.is_variable() || !r.is_coloured()) return r;
  std::vector<Term> args;
  args.reserve(r.arity());
  for (const auto& a : r.args()) args.push_back(recolour(a, mu));
  SymbolId head = r.symbol();
  if (r.polarity() != Polarity::none) head = mu.at(head);
  return Term::application(head, r.polarity(), std::move(args));
}

}  // namespace

Constellation colour_shift(const Constellation& phi, const std::map<std::string, std::string>& mu) {
  std::map<SymbolId, SymbolId> map;
  std::set<SymbolId> image;
  for (const auto& name : colour_names(phi)) {
    auto it = mu.find(name);
    if (it == mu.end()) throw std::invalid_argument("colour_shift: no image for colour " + name);
    const SymbolId target = intern(it->second);
    if (!image.insert(target).second) throw std::invalid_argument("colour_shift: map is not injective");
    map.emplace(intern(name), target);
  }
  Constellation out;
  for (const auto& s : phi.stars) {
    Star t;
    for (const auto& r : s.rays) t.rays.push_back(recolour(r, map));
    out.stars.push_back(std::move(t));
  }
  return out;
}

std::set<std::string> colour_names(const Constellation& phi) {
  std::set<std::string> out;
  for (const auto& s : phi.stars) {
    for (const auto& r : s.rays) {
      for (auto id : colours_of(r)) out.insert(symbol_name(id));
    }
  }
  return out;
}

DependencyGraph::DependencyGraph(const Constellation& phi, const ColourSet& colours) : colours_(colours) {
  std::size_t total = 0;
  for (const auto& s : phi.stars) {
    ray_base_.push_back(total);
    ray_counts_.push_back(s.size());
    total += s.size();
  }
  incidence_.assign(total, {});
  std::vector<RayAddress> active;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = 0; j < phi[i].size(); ++j) {
      if (has_colour_in(phi[i].rays[j], colours)) active.push_back({i, j});
    }
  }
  for (std::size_t x = 0; x < active.size(); ++x) {
    for (std::size_t y = x + 1; y < active.size(); ++y) {
      const Term& ra = phi[active[x].star].rays[active[x].ray];
      const Term& rb = phi[active[y].star].rays[active[y].ray];
      if (!matchable(ra, rb, colours)) continue;
      const Term renamed = rename_apart(rb, max_scope(ra) + 1);
      auto result = unify(underlying(ra), underlying(renamed));
      DependencyEdge e{active[x], active[y], std::nullopt};
      if (result.ok()) e.mgu = result.unifier();
      const std::size_t index = edges_.size();
      edges_.push_back(std::move(e));
      incidence_[ray_base_[active[x].star] + active[x].ray].push_back(index);
      incidence_[ray_base_[active[y].star] + active[y].ray].push_back(index);
    }
  }
}

const std::vector<std::size_t>& DependencyGraph::incident(const RayAddress& r) const {
  return incidence_.at(ray_base_.at(r.star) + r.ray);
}

RayAddress DependencyGraph::other_end(std::size_t e, const RayAddress& r) const {
  const auto& edge = edges_.at(e);
  return edge.a == r ? edge.b : edge.a;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> DependencyGraph::components() const {
  UnionFind uf(vertex_count());
  for (const auto& e : edges_) uf.unite(e.a.star, e.b.star);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t v = 0; v < vertex_count(); ++v) groups[uf.find(v)].push_back(v);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

bool DependencyGraph::acyclic() const { return !find_cycle().has_value(); }

bool DependencyGraph::connected() const { return components().size() <= 1; }

std::optional<std::vector<std::size_t>> DependencyGraph::find_cycle() const {
  UnionFind uf(vertex_count());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> forest(vertex_count());  // (neighbour, edge)
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const std::size_t u = edges_[k].a.star;
    const std::size_t v = edges_[k].b.star;
    if (uf.unite(u, v)) {
      forest[u].push_back({v, k});
      forest[v].push_back({u, k});
      continue;
    }
    // Edge k closes a cycle: recover the tree path from v back to u.
    std::vector<std::size_t> cycle{k};
    if (u == v) return cycle;
    std::vector<std::optional<std::pair<std::size_t, std::size_t>>> prev(vertex_count());
    std::deque<std::size_t> queue{v};
    std::vector<bool> seen(vertex_count(), false);
    seen[v] = true;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      if (x == u) break;
      for (const auto& [y, e] : forest[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        prev[y] = std::make_pair(x, e);
        queue.push_back(y);
      }
    }
    for (std::size_t x = u; x != v; x = prev[x]->first) cycle.push_back(prev[x]->second);
    return cycle;
  }
  return std::nullopt;
}

namespace {
std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace

std::string DependencyGraph::to_dot(const Constellation& phi) const {
  std::ostringstream os;
  os << "graph dependencies {\n";
  for (std::size_t i = 0; i < phi.size(); ++i) {
    os << "  s" << i << " [label=\"" << dot_escape(phi[i].to_string()) << "\"];\n";
  }
  for (const auto& e : edges_) {
    os << "  s" << e.a.star << " -- s" << e.b.star << " [label=\"" << e.a.ray << ":" << e.b.ray << "\"";
    if (!e.mgu) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

PropertyReport analyze(const Constellation& phi, const ColourSet& colours) {
  DependencyGraph g(phi, colours);
  PropertyReport report;
  report.colours = colours.to_string();
  for (const auto& e : g.edges()) {
    const Term& ra = phi[e.a.star].rays[e.a.ray];
    const Term& rb = phi[e.b.star].rays[e.b.ray];
    if (!alpha_equivalent(underlying(ra), underlying(rb))) report.exact = false;
  }
  report.acyclic = g.acyclic();
  report.connected = g.connected();
  for (std::size_t i = 0; i < phi.size() && report.monovalent; ++i) {
    for (std::size_t j = 0; j < phi[i].size(); ++j) {
      if (g.incident({i, j}).size() >= 2) {
        report.monovalent = false;
        break;
      }
    }
  }
  return report;
}

namespace {

/// Occurrences reachable by a dependency path from some star of `sources`.
/// A path enters a star through a ray and may only leave it through a
/// different ray (links are one per ray in a diagram).
std::set<VariableOccurrence> accessible_from(const Constellation& phi, const DependencyGraph& g,
                                             const std::vector<std::size_t>& sources) {
  std::set<RayAddress> entered;
  std::deque<RayAddress> queue;
  auto leave = [&](std::size_t star, std::optional<std::size_t> via) {
    for (std::size_t j = 0; j < phi[star].size(); ++j) {
      if (via && *via == j) continue;
      const RayAddress from{star, j};
      for (auto e : g.incident(from)) {
        const RayAddress to = g.other_end(e, from);
        if (entered.insert(to).second) queue.push_back(to);
      }
    }
  };
  for (auto s : sources) leave(s, std::nullopt);
  while (!queue.empty()) {
    const RayAddress r = queue.front();
    queue.pop_front();
    leave(r.star, r.ray);
  }
  std::set<VariableOccurrence> out;
  for (const auto& r : entered) {
    for (const auto& v : variables(phi[r.star].rays[r.ray])) out.insert({r.star, r.ray, v});
  }
  return out;
}

}  // namespace

std::set<VariableOccurrence> shared_variables(const Constellation& phi,
                                              const std::vector<std::vector<std::size_t>>& groups,
                                              const ColourSet& colours) {
  DependencyGraph g(phi, colours);
  std::optional<std::set<VariableOccurrence>> common;
  for (const auto& group : groups) {
    auto acc = accessible_from(phi, g, group);
    if (!common) {
      common = std::move(acc);
      continue;
    }
    std::set<VariableOccurrence> next;
    std::set_intersection(common->begin(), common->end(), acc.begin(), acc.end(),
                          std::inserter(next, next.end()));
    common = std::move(next);
  }
  return common.value_or(std::set<VariableOccurrence>{});
}

std::set<VariableOccurrence> shared_variables(const Constellation& phi1, const Constellation& phi2,
                                              const ColourSet& colours) {
  std::vector<std::size_t> first(phi1.size());
  std::iota(first.begin(), first.end(), 0);
  std::vector<std::size_t> second(phi2.size());
  std::iota(second.begin(), second.end(), phi1.size());
  return shared_variables(disjoint_union(phi1, phi2), {first, second}, colours);
}

}  // namespace stellar
