#pragma once

// Graph-level oracles written against the definitions only: brute-force
// diagram enumeration, dependency structure from pairwise matchability, and a
// backtracking multigraph isomorphism test.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "stellar/constellation.hpp"
#include "stellar/engine.hpp"
#include "stellar/unify.hpp"

namespace stellar::testing {

// ---------------------------------------------------------------------------
// Union-find

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) { return parent_[x] == x ? x : parent_[x] = find(parent_[x]); }
  /// Returns false when a and b were already joined.
  bool join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// ---------------------------------------------------------------------------
// Dependency structure recomputed from pairwise matchability

struct DualPair {
  RayAddress a;
  RayAddress b;
};

/// Every unordered pair of distinct ray addresses whose rays are matchable.
inline std::vector<DualPair> dual_pairs(const Constellation& phi, const ColourSet& colours) {
  std::vector<RayAddress> rays;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = 0; j < phi[i].size(); ++j) rays.push_back({i, j});
  }
  std::vector<DualPair> out;
  for (std::size_t x = 0; x < rays.size(); ++x) {
    for (std::size_t y = x + 1; y < rays.size(); ++y) {
      if (matchable(phi[rays[x].star].rays[rays[x].ray], phi[rays[y].star].rays[rays[y].ray], colours)) {
        out.push_back({rays[x], rays[y]});
      }
    }
  }
  return out;
}

/// Acyclicity of the star multigraph (a loop or a parallel edge is a cycle).
inline bool acyclic_by_pairs(const Constellation& phi, const ColourSet& colours) {
  DisjointSets sets(phi.size());
  for (const auto& p : dual_pairs(phi, colours)) {
    if (!sets.join(p.a.star, p.b.star)) return false;
  }
  return true;
}

/// Connected components of stars, each sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> components_by_pairs(const Constellation& phi, const ColourSet& colours) {
  DisjointSets sets(phi.size());
  for (const auto& p : dual_pairs(phi, colours)) sets.join(p.a.star, p.b.star);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < phi.size(); ++i) groups[sets.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

inline Constellation restrict_to(const Constellation& phi, const std::vector<std::size_t>& stars) {
  Constellation out;
  for (auto i : stars) out.stars.push_back(phi[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force diagrams

/// Calls `visit` on every diagram of Φ with at most `max_vertices` vertices:
/// every non-decreasing labelling of the vertices by stars and every set of
/// links (each ray occurrence linked at most once, linked rays matchable)
/// that connects the vertices.  Isomorphic copies are not merged.  Stops
/// early when `visit` returns false or after `limit` diagrams.
inline void for_each_small_diagram(const Constellation& phi, const ColourSet& colours, std::size_t max_vertices,
                                   const std::function<bool(const Diagram&)>& visit, std::size_t limit = 5000) {
  std::size_t emitted = 0;
  bool stop = false;
  std::vector<std::size_t> labels;
  std::function<void(std::size_t, std::size_t)> choose_labels;

  auto enumerate_links = [&]() {
    std::vector<std::pair<std::size_t, std::size_t>> occ;
    for (std::size_t v = 0; v < labels.size(); ++v) {
      for (std::size_t j = 0; j < phi[labels[v]].size(); ++j) occ.emplace_back(v, j);
    }
    std::vector<std::vector<bool>> dual(occ.size(), std::vector<bool>(occ.size(), false));
    for (std::size_t x = 0; x < occ.size(); ++x) {
      for (std::size_t y = x + 1; y < occ.size(); ++y) {
        dual[x][y] = matchable(phi[labels[occ[x].first]].rays[occ[x].second],
                               phi[labels[occ[y].first]].rays[occ[y].second], colours);
      }
    }
    std::vector<bool> used(occ.size(), false);
    Diagram d;
    d.vertices = labels;
    std::function<void(std::size_t)> go = [&](std::size_t k) {
      if (stop) return;
      if (k == occ.size()) {
        DisjointSets sets(labels.size());
        std::size_t parts = labels.size();
        for (const auto& l : d.links) {
          if (sets.join(l.u, l.v)) --parts;
        }
        if (parts != 1) return;
        if (!visit(d) || ++emitted >= limit) stop = true;
        return;
      }
      go(k + 1);  // occurrence k stays free (or was linked earlier)
      if (used[k]) return;
      for (std::size_t y = k + 1; y < occ.size() && !stop; ++y) {
        if (used[y] || !dual[k][y]) continue;
        used[k] = used[y] = true;
        d.links.push_back({occ[k].first, occ[k].second, occ[y].first, occ[y].second});
        go(k + 1);
        d.links.pop_back();
        used[k] = used[y] = false;
      }
    };
    go(0);
  };

  choose_labels = [&](std::size_t remaining, std::size_t from) {
    if (stop) return;
    if (!labels.empty()) enumerate_links();
    if (remaining == 0) return;
    for (std::size_t s = from; s < phi.size() && !stop; ++s) {
      labels.push_back(s);
      choose_labels(remaining - 1, s);
      labels.pop_back();
    }
  };
  choose_labels(max_vertices, 0);
}

// ---------------------------------------------------------------------------
// Multigraph isomorphism

/// Undirected multigraph given by an edge list (loops allowed).
struct Multigraph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::vector<std::vector<std::size_t>> multiplicity() const {
    std::vector<std::vector<std::size_t>> m(nodes, std::vector<std::size_t>(nodes, 0));
    for (auto [a, b] : edges) {
      ++m[a][b];
      if (a != b) ++m[b][a];
    }
    return m;
  }
};

/// Colour refinement (1-WL) classes, used to prune the isomorphism search.
inline std::vector<std::size_t> refine_colours(const std::vector<std::vector<std::size_t>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> colour(n, 0);
  for (std::size_t round = 0; round <= n; ++round) {
    std::map<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>, std::size_t> ids;
    std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>> sig(n);
    for (std::size_t v = 0; v < n; ++v) {
      sig[v].first = colour[v];
      for (std::size_t w = 0; w < n; ++w) {
        if (m[v][w] != 0) sig[v].second.emplace_back(colour[w], m[v][w]);
      }
      std::sort(sig[v].second.begin(), sig[v].second.end());
      ids.emplace(sig[v], 0);
    }
    std::size_t next = 0;
    for (auto& [key, id] : ids) id = next++;
    std::vector<std::size_t> refined(n);
    for (std::size_t v = 0; v < n; ++v) refined[v] = ids[sig[v]];
    if (refined == colour) break;
    colour = std::move(refined);
  }
  return colour;
}

/// Exact isomorphism test by backtracking over refinement-compatible maps.
/// Both graphs are refined jointly so that their colour classes agree.
inline bool isomorphic(const Multigraph& g, const Multigraph& h) {
  if (g.nodes != h.nodes || g.edges.size() != h.edges.size()) return false;
  const std::size_t n = g.nodes;
  // Disjoint union refined once gives comparable classes.
  Multigraph both;
  both.nodes = 2 * n;
  both.edges = g.edges;
  for (auto [a, b] : h.edges) both.edges.emplace_back(a + n, b + n);
  const auto mb = both.multiplicity();
  const auto colour = refine_colours(mb);
  std::vector<std::size_t> cg(colour.begin(), colour.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<std::size_t> ch(colour.begin() + static_cast<std::ptrdiff_t>(n), colour.end());
  {
    auto a = cg, b = ch;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  const auto mg = g.multiplicity();
  const auto mh = h.multiplicity();
  // Order g's nodes so that each one (after the first of its component)
  // is adjacent to an earlier one.
  std::vector<std::size_t> order;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> queue{s};
    seen[s] = true;
    for (std::size_t k = 0; k < queue.size(); ++k) {
      const std::size_t v = queue[k];
      order.push_back(v);
      for (std::size_t w = 0; w < n; ++w) {
        if (!seen[w] && mg[v][w] != 0) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
  }
  std::vector<std::size_t> image(n, SIZE_MAX);
  std::vector<bool> taken(n, false);
  std::function<bool(std::size_t)> go = [&](std::size_t k) {
    if (k == n) return true;
    const std::size_t v = order[k];
    for (std::size_t w = 0; w < n; ++w) {
      if (taken[w] || ch[w] != cg[v]) continue;
      bool ok = mg[v][v] == mh[w][w];
      for (std::size_t p = 0; p < k && ok; ++p) {
        const std::size_t u = order[p];
        ok = mg[v][u] == mh[w][image[u]];
      }
      if (!ok) continue;
      image[v] = w;
      taken[w] = true;
      if (go(k + 1)) return true;
      taken[w] = false;
      image[v] = SIZE_MAX;
    }
    return false;
  };
  return go(0);
}

/// The star multigraph of a dependency graph.
inline Multigraph star_graph(const DependencyGraph& graph) {
  Multigraph g;
  g.nodes = graph.vertex_count();
  for (const auto& e : graph.edges()) g.edges.emplace_back(e.a.star, e.b.star);
  return g;
}

}  // namespace stellar::testing
