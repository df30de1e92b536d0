#include "stellar/engine.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "rational_lp.hpp"

namespace stellar {

bool Diagram::is_linked(std::size_t v, std::size_t j) const {
  return std::any_of(links.begin(), links.end(), [&](const Link& l) {
    return (l.u == v && l.ray_u == j) || (l.v == v && l.ray_v == j);
  });
}

std::string Diagram::to_string() const {
  std::ostringstream os;
  os << "vertices:";
  for (std::size_t v = 0; v < vertices.size(); ++v) os << ' ' << v << ':' << vertices[v];
  os << " links:";
  for (const auto& l : links) os << " (" << l.u << '.' << l.ray_u << ' ' << l.v << '.' << l.ray_v << ')';
  return os.str();
}

std::string Diagram::to_dot(const Constellation& phi) const {
  std::ostringstream os;
  os << "graph diagram {\n";
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    std::string label = phi[vertices[v]].to_string();
    std::string escaped;
    for (char c : label) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    os << "  v" << v << " [label=\"" << v << ": " << escaped << "\"];\n";
  }
  for (const auto& l : links) {
    os << "  v" << l.u << " -- v" << l.v << " [label=\"" << l.ray_u << ":" << l.ray_v << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

Term vertex_ray(const Constellation& phi, const Diagram& d, std::size_t v, std::size_t j) {
  return with_scope(phi[d.vertices.at(v)].rays.at(j), static_cast<std::uint32_t>(v + 1));
}

std::optional<std::string> validate_diagram(const Constellation& phi, const Diagram& d, const ColourSet& colours) {
  if (d.vertices.empty()) return "a diagram has at least one vertex";
  for (auto s : d.vertices) {
    if (s >= phi.size()) return "vertex labelled with unknown star " + std::to_string(s);
  }
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::vector<std::size_t> parent(d.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& l : d.links) {
    if (l.u >= d.size() || l.v >= d.size()) return std::string("link to an unknown vertex");
    if (l.ray_u >= phi[d.vertices[l.u]].size() || l.ray_v >= phi[d.vertices[l.v]].size()) {
      return std::string("link to an unknown ray");
    }
    if (l.u == l.v && l.ray_u == l.ray_v) return std::string("a ray cannot be linked to itself");
    if (!used.insert({l.u, l.ray_u}).second || !used.insert({l.v, l.ray_v}).second) {
      return "ray occurrence linked twice at vertex " + std::to_string(l.u) + " or " + std::to_string(l.v);
    }
    const Term& a = phi[d.vertices[l.u]].rays[l.ray_u];
    const Term& b = phi[d.vertices[l.v]].rays[l.ray_v];
    if (!matchable(a, b, colours)) return "linked rays are not dual: " + a.to_string() + " / " + b.to_string();
    parent[find(l.u)] = find(l.v);
  }
  for (std::size_t v = 1; v < d.size(); ++v) {
    if (find(v) != find(0)) return std::string("diagram is not connected");
  }
  return std::nullopt;
}

UnificationProblem underlying_problem(const Constellation& phi, const Diagram& d) {
  UnificationProblem p;
  p.reserve(d.links.size());
  for (const auto& l : d.links) {
    p.push_back({underlying(vertex_ray(phi, d, l.u, l.ray_u)), underlying(vertex_ray(phi, d, l.v, l.ray_v))});
  }
  return p;
}

bool is_correct(const Constellation& phi, const Diagram& d) { return solve(underlying_problem(phi, d)).ok(); }

Star actualise(const Constellation& phi, const Diagram& d) {
  auto result = solve(underlying_problem(phi, d));
  if (!result.ok()) throw std::invalid_argument("actualise: diagram is not correct (" + result.failure().describe() + ")");
  Star out;
  for (std::size_t v = 0; v < d.size(); ++v) {
    for (std::size_t j = 0; j < phi[d.vertices[v]].size(); ++j) {
      if (!d.is_linked(v, j)) out.rays.push_back(result.unifier().apply(vertex_ray(phi, d, v, j)));
    }
  }
  return out;
}

bool is_saturated(const Constellation& phi, const Diagram& d, const DependencyGraph& graph) {
  for (std::size_t v = 0; v < d.size(); ++v) {
    for (std::size_t j = 0; j < phi[d.vertices[v]].size(); ++j) {
      if (!d.is_linked(v, j) && graph.linkable({d.vertices[v], j})) return false;
    }
  }
  return true;
}

Star FusionDiagram::star() const {
  if (nodes.size() != 1) throw std::logic_error("fusion diagram has more than one star");
  const auto& node = nodes.front();
  std::vector<std::size_t> order(node.rays.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return node.origins[a] < node.origins[b]; });
  Star out;
  for (auto i : order) out.rays.push_back(node.rays[i]);
  return out;
}

FusionDiagram to_fusion_diagram(const Constellation& phi, const Diagram& d) {
  FusionDiagram f;
  for (std::size_t v = 0; v < d.size(); ++v) {
    FusionDiagram::Node node;
    for (std::size_t j = 0; j < phi[d.vertices[v]].size(); ++j) {
      node.rays.push_back(vertex_ray(phi, d, v, j));
      node.origins.push_back({v, j});
    }
    f.nodes.push_back(std::move(node));
  }
  for (const auto& l : d.links) f.links.push_back({{l.u, l.ray_u}, {l.v, l.ray_v}});
  return f;
}

std::variant<FusionDiagram, Failure> fuse_step(const FusionDiagram& d, std::size_t index) {
  if (index >= d.links.size()) throw std::out_of_range("fuse_step: no such link");
  const auto [ea, eb] = d.links[index];
  auto locate = [&](std::pair<std::size_t, std::size_t> origin) {
    for (std::size_t n = 0; n < d.nodes.size(); ++n) {
      const auto& o = d.nodes[n].origins;
      auto it = std::find(o.begin(), o.end(), origin);
      if (it != o.end()) return std::make_pair(n, static_cast<std::size_t>(it - o.begin()));
    }
    throw std::logic_error("fuse_step: dangling link");
  };
  const auto [na, ia] = locate(ea);
  const auto [nb, ib] = locate(eb);
  auto result = unify(underlying(d.nodes[na].rays[ia]), underlying(d.nodes[nb].rays[ib]));
  if (!result.ok()) return result.failure();
  const Substitution& theta = result.unifier();
  FusionDiagram out;
  FusionDiagram::Node merged;
  auto append = [&](std::size_t n, std::optional<std::size_t> skip_a, std::optional<std::size_t> skip_b) {
    for (std::size_t i = 0; i < d.nodes[n].rays.size(); ++i) {
      if (i == skip_a || i == skip_b) continue;
      merged.rays.push_back(d.nodes[n].rays[i]);
      merged.origins.push_back(d.nodes[n].origins[i]);
    }
  };
  if (na == nb) {
    append(na, ia, ib);
  } else {
    append(na, ia, std::nullopt);
    append(nb, ib, std::nullopt);
  }
  const std::size_t keep = std::min(na, nb);
  for (std::size_t n = 0; n < d.nodes.size(); ++n) {
    if (n == na || n == nb) {
      if (n == keep) out.nodes.push_back(merged);
      continue;
    }
    out.nodes.push_back(d.nodes[n]);
  }
  for (auto& node : out.nodes) node.rays = theta.apply(node.rays);
  for (std::size_t k = 0; k < d.links.size(); ++k) {
    if (k != index) out.links.push_back(d.links[k]);
  }
  return out;
}

Constellation conceal(const Constellation& phi) {
  Constellation out;
  for (const auto& s : phi.stars) {
    if (std::none_of(s.rays.begin(), s.rays.end(), [](const Term& r) { return r.is_coloured(); })) {
      out.stars.push_back(s);
    }
  }
  return out;
}

Constellation filter_noise(const Constellation& phi) {
  Constellation out;
  for (const auto& s : phi.stars) {
    if (!s.empty()) out.stars.push_back(s);
  }
  return out;
}

namespace {

/// Canonical code of a connected labelled graph whose edges are attached to
/// numbered ports (rays), each port carrying at most one edge.  Starting from
/// a vertex, a breadth-first traversal visiting ports in order numbers the
/// vertices uniquely; the minimum code over all start vertices with the
/// smallest label is an isomorphism invariant.
struct PortGraph {
  const std::vector<std::size_t>& label;
  const std::vector<std::vector<std::int64_t>>& port;  // -1 or (vertex * stride + ray)
  std::size_t stride;
};

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> canonical_code(const PortGraph& g) {
  const std::size_t n = g.label.size();
  std::vector<std::size_t> best_code;
  std::vector<std::size_t> best_order;
  const std::size_t min_label = *std::min_element(g.label.begin(), g.label.end());
  std::vector<std::size_t> number(n);
  for (std::size_t start = 0; start < n; ++start) {
    if (g.label[start] != min_label) continue;
    std::fill(number.begin(), number.end(), SIZE_MAX);
    std::vector<std::size_t> order{start};
    number[start] = 0;
    std::vector<std::size_t> code;
    bool worse = false;
    bool better = best_code.empty();
    auto emit = [&](std::size_t x) {
      if (!better && !worse) {
        const std::size_t pos = code.size();
        if (x < best_code[pos]) better = true;
        else if (x > best_code[pos]) worse = true;
      }
      code.push_back(x);
    };
    for (std::size_t i = 0; i < order.size() && !worse; ++i) {
      const std::size_t v = order[i];
      emit(g.label[v]);
      for (std::size_t j = 0; j < g.port[v].size() && !worse; ++j) {
        const std::int64_t p = g.port[v][j];
        if (p < 0) {
          emit(0);
          continue;
        }
        const std::size_t w = static_cast<std::size_t>(p) / g.stride;
        const std::size_t r = static_cast<std::size_t>(p) % g.stride;
        if (number[w] == SIZE_MAX) {
          number[w] = order.size();
          order.push_back(w);
        }
        emit(1 + number[w] * g.stride + r);
      }
    }
    if (!worse && better) {
      best_code = std::move(code);
      best_order = std::move(order);
    }
  }
  return {best_order, best_code};
}

struct CodeHash {
  std::size_t operator()(const std::vector<std::size_t>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto x : v) h = (h ^ x) * 0x100000001b3ULL;
    return h;
  }
};

/// Immutable data shared by every search branch.
struct Prepared {
  Constellation phi;
  DependencyGraph graph;
  std::size_t stride = 1;  // > maximal ray count
  std::vector<std::vector<bool>> linkable;
  std::vector<std::vector<Term>> under;
  /// Dual partners with a solvable edge equation, per ray.
  std::vector<std::vector<std::vector<std::pair<std::size_t, std::size_t>>>> partners;
};

Prepared prepare(const Constellation& input, const ColourSet& colours) {
  Prepared p;
  for (const auto& s : input.stars) p.phi.stars.push_back(normalise_variables(s));
  p.graph = DependencyGraph(p.phi, colours);
  const std::size_t n = p.phi.size();
  p.linkable.resize(n);
  p.under.resize(n);
  p.partners.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& star = p.phi[i];
    p.stride = std::max(p.stride, star.size() + 1);
    for (std::size_t j = 0; j < star.size(); ++j) {
      p.linkable[i].push_back(p.graph.linkable({i, j}));
      p.under[i].push_back(underlying(star.rays[j]));
      std::vector<std::pair<std::size_t, std::size_t>> partners;
      for (auto e : p.graph.incident({i, j})) {
        if (!p.graph.edges()[e].mgu) continue;
        const auto other = p.graph.other_end(e, {i, j});
        partners.push_back({other.star, other.ray});
      }
      p.partners[i].push_back(std::move(partners));
    }
  }
  return p;
}

/// Partial diagram during the search.
struct Partial {
  std::vector<std::size_t> label;
  std::vector<std::vector<std::int64_t>> port;  // -1 = free
  std::vector<std::vector<Term>> inst;           // instantiated underlying linkable rays
};

struct Option {
  bool fresh = false;
  std::size_t star = 0;
  std::size_t ray = 0;
  std::size_t vertex = 0;  // when closing onto an existing vertex
  Substitution unifier;
};

enum class RootVerdict { search, no_diagram, only_empty };

/// Sound static analysis of the stars allowed below a root, used to skip
/// roots that cannot produce a (non-empty, when requested) diagram.
class RootAnalysis {
 public:
  explicit RootAnalysis(const Prepared& p) : p_(p) {}

  /// Stars that may occur in a correct saturated diagram containing `root`
  /// when only `allowed` stars are available.
  RootVerdict analyse(std::size_t root, std::vector<bool>& allowed, bool drop_empty) const {
    remove_dead(allowed);
    if (!allowed[root]) return RootVerdict::no_diagram;
    restrict_to_component(root, allowed);
    if (!flow_feasible(root, allowed)) return RootVerdict::no_diagram;
    if (monotone_cycles_only(allowed)) return RootVerdict::no_diagram;
    if (drop_empty && !open_star_reachable(root, allowed)) return RootVerdict::only_empty;
    return RootVerdict::search;
  }

 private:
  /// A star is dead when one of its linkable rays has no solvable partner
  /// among the allowed stars: saturation forces a link that cannot exist.
  void remove_dead(std::vector<bool>& allowed) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t s = 0; s < allowed.size(); ++s) {
        if (!allowed[s]) continue;
        for (std::size_t j = 0; j < p_.phi[s].size(); ++j) {
          if (!p_.linkable[s][j]) continue;
          const auto& ps = p_.partners[s][j];
          if (std::none_of(ps.begin(), ps.end(), [&](const auto& q) { return allowed[q.first]; })) {
            allowed[s] = false;
            changed = true;
            break;
          }
        }
      }
    }
  }

  void restrict_to_component(std::size_t root, std::vector<bool>& allowed) const {
    std::vector<bool> seen(allowed.size(), false);
    std::deque<std::size_t> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < p_.phi[s].size(); ++j) {
        for (const auto& [t, _] : p_.partners[s][j]) {
          if (allowed[t] && !seen[t]) {
            seen[t] = true;
            queue.push_back(t);
          }
        }
      }
    }
    allowed = seen;
  }

  /// Counting argument: with n_s copies of star s and x_e links along dual
  /// pair e, every linkable ray of every copy is linked exactly once, so
  /// Σ_{e ∋ ray} x_e = n_s.  Without a rational solution having n_root ≥ 1
  /// (and n_also ≥ 1) there is no finite saturated diagram.
  bool flow_feasible(std::size_t root, const std::vector<bool>& allowed,
                     std::optional<std::size_t> also = std::nullopt) const {
    std::vector<std::size_t> star_var(allowed.size(), SIZE_MAX);
    std::size_t vars = 0;
    for (std::size_t s = 0; s < allowed.size(); ++s) {
      if (allowed[s]) star_var[s] = vars++;
    }
    std::map<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>, std::size_t> edge_var;
    std::vector<detail::LinearRow> rows;
    std::vector<long> rhs;
    for (std::size_t s = 0; s < allowed.size(); ++s) {
      if (!allowed[s]) continue;
      for (std::size_t j = 0; j < p_.phi[s].size(); ++j) {
        if (!p_.linkable[s][j]) continue;
        detail::LinearRow row;
        for (const auto& q : p_.partners[s][j]) {
          if (!allowed[q.first]) continue;
          const std::pair<std::size_t, std::size_t> self{s, j};
          auto key = self < q ? std::make_pair(self, q) : std::make_pair(q, self);
          auto [it, inserted] = edge_var.emplace(key, 0);
          if (inserted) it->second = vars++;
          row.push_back({it->second, 1});
        }
        row.push_back({star_var[s], -1});
        rows.push_back(std::move(row));
        rhs.push_back(0);
      }
    }
    if (!also || *also == root) {
      rows.push_back({{star_var[root], 1}});
      rhs.push_back(1);
    } else {
      // The system is homogeneous: n_root ≥ 1 and n_also ≥ 1 together (the
      // root may need several copies once `also` is present).
      rows.push_back({{star_var[root], 1}, {vars++, -1}});
      rhs.push_back(1);
      // n_also ≥ 1 through a surplus variable.
      rows.push_back({{star_var[*also], 1}, {vars++, -1}});
      rhs.push_back(1);
    }
    return detail::feasible(rows, rhs, vars);
  }

  /// Every allowed star has exactly two linkable rays, a positive and a
  /// negative prefix-coloured one, and the positive one strictly dominates
  /// the negative one in size with no fewer occurrences of each variable
  /// (or every star has the reverse).  Saturated diagrams are then cycles
  /// along which the size of the unified terms would strictly increase, so
  /// none of them is correct.
  bool monotone_cycles_only(const std::vector<bool>& allowed) const {
    int direction = 0;
    bool any = false;
    for (std::size_t s = 0; s < allowed.size(); ++s) {
      if (!allowed[s]) continue;
      any = true;
      std::optional<std::size_t> pos, neg;
      std::size_t count = 0;
      for (std::size_t j = 0; j < p_.phi[s].size(); ++j) {
        if (!p_.linkable[s][j]) continue;
        ++count;
        const Term& r = p_.phi[s].rays[j];
        if (!r.is_prefix_coloured()) return false;
        (r.polarity() == Polarity::plus ? pos : neg) = j;
      }
      if (count != 2 || !pos || !neg) return false;
      const Term& a = p_.under[s][*pos];
      const Term& b = p_.under[s][*neg];
      const int d = dominates(a, b) ? 1 : dominates(b, a) ? -1 : 0;
      if (d == 0 || (direction != 0 && d != direction)) return false;
      direction = d;
    }
    return any;
  }

  static bool dominates(const Term& big, const Term& small) {
    if (big.size() <= small.size()) return false;
    for (const auto& v : variables(small)) {
      if (occurrences(v, big) < occurrences(v, small)) return false;
    }
    return true;
  }

  /// Whether some star with an unlinkable ray (which stays free and makes
  /// the actualisation non-empty) can occur in a diagram with the root, by
  /// the same counting argument.  When none can, every diagram is empty.
  bool open_star_reachable(std::size_t root, const std::vector<bool>& allowed) const {
    for (std::size_t s = 0; s < allowed.size(); ++s) {
      if (!allowed[s]) continue;
      const auto& rays = p_.linkable[s];
      const bool open = std::find(rays.begin(), rays.end(), false) != rays.end();
      if (open && flow_feasible(root, allowed, s)) return true;
    }
    return false;
  }

  const Prepared& p_;
};

/// Cheap necessary condition for unifiability: no clash of function symbols
/// at a position where both terms are applications.
bool may_unify(const Term& a, const Term& b) {
  if (a.is_variable() || b.is_variable()) return true;
  if (a.symbol() != b.symbol() || a.polarity() != b.polarity() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!may_unify(a.args()[i], b.args()[i])) return false;
  }
  return true;
}

struct RootOutcome {
  std::vector<Diagram> diagrams;
  bool bound_hit = false;
  bool limit_hit = false;
  bool budget_hit = false;
  std::size_t explored = 0;
  std::size_t pruned = 0;
};

class RootSearch {
 public:
  RootSearch(const Prepared& p, const EngineOptions& options, std::size_t root, std::vector<bool> allowed)
      : p_(p), options_(options), root_(root), allowed_(std::move(allowed)) {}

  RootOutcome run() {
    if (is_marked(root_) && options_.max_marked == 0) {
      out_.limit_hit = true;
      return std::move(out_);
    }
    Partial start;
    add_vertex(start, root_);
    dfs(start);
    return std::move(out_);
  }

 private:
  void add_vertex(Partial& d, std::size_t star) const {
    const std::size_t v = d.label.size();
    d.label.push_back(star);
    d.port.emplace_back(p_.phi[star].size(), -1);
    std::vector<Term> inst(p_.phi[star].size());
    for (std::size_t j = 0; j < inst.size(); ++j) {
      if (p_.linkable[star][j]) inst[j] = with_scope(p_.under[star][j], static_cast<std::uint32_t>(v + 1));
    }
    d.inst.push_back(std::move(inst));
  }

  std::vector<Option> options_for(const Partial& d, std::size_t u, std::size_t j) const {
    std::vector<Option> out;
    const Term& ray = d.inst[u][j];
    const std::uint32_t fresh_scope = static_cast<std::uint32_t>(d.label.size() + 1);
    for (const auto& [s2, j2] : p_.partners[d.label[u]][j]) {
      if (!allowed_[s2]) continue;
      if (may_unify(ray, p_.under[s2][j2])) {
        auto fresh = unify(ray, with_scope(p_.under[s2][j2], fresh_scope));
        if (fresh.ok()) out.push_back(Option{true, s2, j2, 0, fresh.unifier()});
      }
      for (std::size_t v = 0; v < d.label.size(); ++v) {
        if (d.label[v] != s2 || d.port[v][j2] >= 0 || (v == u && j2 == j)) continue;
        if (!may_unify(ray, d.inst[v][j2])) continue;
        auto closing = unify(ray, d.inst[v][j2]);
        if (closing.ok()) out.push_back(Option{false, s2, j2, v, closing.unifier()});
      }
    }
    return out;
  }

  Partial extend(const Partial& d, std::size_t u, std::size_t j, const Option& o) const {
    Partial next = d;
    std::size_t v = o.vertex;
    if (o.fresh) {
      v = next.label.size();
      add_vertex(next, o.star);
    }
    next.port[u][j] = static_cast<std::int64_t>(v * p_.stride + o.ray);
    next.port[v][o.ray] = static_cast<std::int64_t>(u * p_.stride + j);
    for (std::size_t w = 0; w < next.inst.size(); ++w) {
      for (std::size_t k = 0; k < next.inst[w].size(); ++k) {
        if (next.inst[w][k].valid() && next.port[w][k] < 0) next.inst[w][k] = o.unifier.apply(next.inst[w][k]);
      }
    }
    return next;
  }

  void dfs(const Partial& d) {
    if (out_.explored >= options_.max_expansions) {
      out_.budget_hit = true;
      return;
    }
    PortGraph g{d.label, d.port, p_.stride};
    auto code = canonical_code(g).second;
    if (!visited_.insert(std::move(code)).second) {
      ++out_.pruned;
      return;
    }
    ++out_.explored;
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::vector<Option> best_options;
    for (std::size_t u = 0; u < d.label.size(); ++u) {
      for (std::size_t j = 0; j < d.port[u].size(); ++j) {
        if (d.port[u][j] >= 0 || !p_.linkable[d.label[u]][j]) continue;
        auto options = options_for(d, u, j);
        if (options.empty()) {
          ++out_.pruned;  // a ray that must be linked cannot be
          return;
        }
        if (!best || options.size() < best_options.size()) {
          best = {u, j};
          best_options = std::move(options);
        }
        if (best_options.size() == 1) break;  // forced move
      }
      if (best && best_options.size() == 1) break;
    }
    if (!best) {
      out_.diagrams.push_back(to_diagram(d));
      return;
    }
    for (const auto& o : best_options) {
      if (o.fresh && d.label.size() >= options_.max_vertices) {
        out_.bound_hit = true;
        continue;
      }
      if (o.fresh && is_marked(o.star) &&
          static_cast<std::size_t>(std::count_if(d.label.begin(), d.label.end(),
                                                 [&](std::size_t s) { return is_marked(s); })) >=
              options_.max_marked) {
        out_.limit_hit = true;
        continue;
      }
      dfs(extend(d, best->first, best->second, o));
    }
  }

  bool is_marked(std::size_t star) const { return star < options_.marked.size() && options_.marked[star]; }

  Diagram to_diagram(const Partial& d) const {
    Diagram out;
    out.vertices = d.label;
    for (std::size_t u = 0; u < d.label.size(); ++u) {
      for (std::size_t j = 0; j < d.port[u].size(); ++j) {
        const std::int64_t p = d.port[u][j];
        if (p < 0) continue;
        const std::size_t v = static_cast<std::size_t>(p) / p_.stride;
        const std::size_t k = static_cast<std::size_t>(p) % p_.stride;
        if (std::make_pair(u, j) < std::make_pair(v, k)) out.links.push_back({u, j, v, k});
      }
    }
    return out;
  }

  const Prepared& p_;
  const EngineOptions& options_;
  std::size_t root_;
  std::vector<bool> allowed_;
  std::unordered_set<std::vector<std::size_t>, CodeHash> visited_;
  RootOutcome out_;
};

/// Root priority: stars whose linkable rays are most instantiated (few
/// variable occurrences, many symbols) constrain a search the most.
long root_weight(const Prepared& p, std::size_t s) {
  long w = 0;
  for (std::size_t j = 0; j < p.phi[s].size(); ++j) {
    if (!p.linkable[s][j]) continue;
    const Term& r = p.under[s][j];
    long vars = 0;
    for (const auto& v : variables(r)) vars += static_cast<long>(occurrences(v, r));
    w += 2 * vars - static_cast<long>(r.size());
  }
  return w;
}

/// Renumbers the vertices of a diagram canonically.
Diagram canonicalise(const Diagram& d, const Prepared& p) {
  auto [order, _] = canonical_form(d, p.phi);
  std::vector<std::size_t> position(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  Diagram out;
  for (auto v : order) out.vertices.push_back(d.vertices[v]);
  for (const auto& l : d.links) {
    Link m{position[l.u], l.ray_u, position[l.v], l.ray_v};
    if (std::make_pair(m.v, m.ray_v) < std::make_pair(m.u, m.ray_u)) {
      std::swap(m.u, m.v);
      std::swap(m.ray_u, m.ray_v);
    }
    out.links.push_back(m);
  }
  std::sort(out.links.begin(), out.links.end(), [](const Link& a, const Link& b) {
    return std::tie(a.u, a.ray_u, a.v, a.ray_v) < std::tie(b.u, b.ray_u, b.v, b.ray_v);
  });
  return out;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> canonical_form(const Diagram& d, const Constellation& phi) {
  std::size_t stride = 1;
  for (auto s : d.vertices) stride = std::max(stride, phi[s].size() + 1);
  std::vector<std::vector<std::int64_t>> port(d.size());
  for (std::size_t v = 0; v < d.size(); ++v) port[v].assign(phi[d.vertices[v]].size(), -1);
  for (const auto& l : d.links) {
    port[l.u][l.ray_u] = static_cast<std::int64_t>(l.v * stride + l.ray_v);
    port[l.v][l.ray_v] = static_cast<std::int64_t>(l.u * stride + l.ray_u);
  }
  return canonical_code(PortGraph{d.vertices, port, stride});
}

ExecutionResult enumerate_saturated(const Constellation& phi, const EngineOptions& options) {
  if (options.max_vertices == 0) throw std::invalid_argument("max_vertices must be at least 1");
  const Prepared p = prepare(phi, options.colours);
  const std::size_t n = p.phi.size();
  std::vector<std::size_t> roots(n);
  std::iota(roots.begin(), roots.end(), 0);
  // Order by average weight per linkable ray, then by fewer linkable rays.
  std::vector<long> weight(n), degree(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = root_weight(p, s);
    degree[s] = std::count(p.linkable[s].begin(), p.linkable[s].end(), true);
  }
  auto marked = [&](std::size_t s) { return s < options.marked.size() && options.marked[s]; };
  std::stable_sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) {
    if (options.require_marked && marked(a) != marked(b)) return marked(a);
    if (degree[a] == 0 || degree[b] == 0) return degree[a] == 0 && degree[b] != 0;
    const long lhs = weight[a] * degree[b], rhs = weight[b] * degree[a];
    if (lhs != rhs) return lhs < rhs;
    return degree[a] < degree[b];
  });

  // Root k explores diagrams containing roots[k] and only later roots, so
  // every diagram is found from exactly one root.
  std::vector<RootOutcome> outcomes(n);
  // Under concealment, a star with a coloured ray that can never be linked
  // only contributes diagrams that are hidden anyway.
  std::vector<bool> keeps_colour(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < p.phi[s].size(); ++j) {
      if (!p.linkable[s][j] && p.phi[s].rays[j].is_coloured()) keeps_colour[s] = true;
    }
  }
  RootAnalysis analysis(p);
  auto work = [&](std::size_t k) {
    // Diagrams with a marked star were all found from the marked roots.
    if (options.require_marked && !marked(roots[k])) return;
    std::vector<bool> allowed(n, false);
    for (std::size_t i = k; i < n; ++i) allowed[roots[i]] = !(options.conceal && keeps_colour[roots[i]]);
    const RootVerdict verdict = analysis.analyse(roots[k], allowed, options.drop_empty);
    if (verdict != RootVerdict::search) {
      ++outcomes[k].pruned;
      return;
    }
    outcomes[k] = RootSearch(p, options, roots[k], std::move(allowed)).run();
  };
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1 || n < 2) {
    for (std::size_t k = 0; k < n; ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t) {
      threads.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) work(k);
      });
    }
    for (auto& t : threads) t.join();
  }

  ExecutionResult result;
  result.max_vertices = options.max_vertices;
  std::vector<std::pair<Star, Diagram>> found;
  for (auto& o : outcomes) {
    result.diagrams_explored += o.explored;
    result.diagrams_pruned += o.pruned;
    if (o.bound_hit && result.incomplete_reason.empty()) result.incomplete_reason = "vertex bound";
    if (o.limit_hit && result.incomplete_reason.empty()) result.incomplete_reason = "star limit";
    if (o.budget_hit) result.incomplete_reason = "expansion budget";
    for (auto& d : o.diagrams) {
      Diagram c = canonicalise(d, p);
      Star s = normalise_variables(actualise(p.phi, c));
      found.push_back({std::move(s), std::move(c)});
    }
  }
  result.complete = result.incomplete_reason.empty();
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  for (auto& [s, d] : found) {
    if (options.drop_empty && s.empty()) continue;
    if (options.conceal && std::any_of(s.rays.begin(), s.rays.end(), [](const Term& r) { return r.is_coloured(); })) {
      continue;
    }
    result.stars.stars.push_back(std::move(s));
    if (options.keep_diagrams) result.diagrams.push_back(std::move(d));
  }
  return result;
}

ExecutionResult execute(const Constellation& phi, const EngineOptions& options) {
  return enumerate_saturated(phi, options);
}

}  // namespace stellar
