#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stellar/term.hpp"
#include "stellar/unify.hpp"

namespace stellar {

/// A finite indexed family of rays; variables are local to the star.
struct Star {
  std::vector<Term> rays;

  Star() = default;
  Star(std::initializer_list<Term> rs) : rays(rs) {}
  explicit Star(std::vector<Term> rs) : rays(std::move(rs)) {}

  bool empty() const { return rays.empty(); }
  std::size_t size() const { return rays.size(); }
  std::string to_string() const;
  friend bool operator==(const Star&, const Star&) = default;
};

/// An indexed multiset of stars.
struct Constellation {
  std::vector<Star> stars;

  Constellation() = default;
  Constellation(std::initializer_list<Star> ss) : stars(ss) {}
  explicit Constellation(std::vector<Star> ss) : stars(std::move(ss)) {}

  std::size_t size() const { return stars.size(); }
  bool empty() const { return stars.empty(); }
  const Star& operator[](std::size_t i) const { return stars[i]; }
  std::string to_string() const;
};

struct RayAddress {
  std::size_t star = 0;
  std::size_t ray = 0;
  friend bool operator==(const RayAddress&, const RayAddress&) = default;
  friend auto operator<=>(const RayAddress&, const RayAddress&) = default;
};

/// α-equivalence: a bijective variable renaming maps one star onto the other
/// ray for ray (ray order is significant).
bool alpha_equivalent(const Star& a, const Star& b);
bool alpha_equivalent(const Term& a, const Term& b);
/// α-equivalence up to a permutation of rays.
bool equivalent_up_to_ray_order(const Star& a, const Star& b);
/// Multiset equality of constellations up to α-equivalence and ray order.
bool equivalent_multisets(const Constellation& a, const Constellation& b);

/// Renames every variable of the star to scope 0 with readable, distinct names
/// (base name when free, otherwise a numeric suffix).
Star normalise_variables(const Star& s);
/// Deterministic representative used for sorting and printing output stars.
Star canonical_star(const Star& s);
/// Total order on canonical stars.
bool canonical_less(const Star& a, const Star& b);

Constellation disjoint_union(const Constellation& a, const Constellation& b);

/// Wraps every ray r into the unary colour c(r) with the given polarity.
/// Throws std::invalid_argument when a ray is already coloured.
Constellation colour_wrap(const Constellation& phi, std::string_view colour, Polarity polarity);

/// Recolours every colour occurrence via an injective map on base names.
/// Throws std::invalid_argument when the map is not injective on the colours
/// that occur, or misses one of them.
Constellation colour_shift(const Constellation& phi, const std::map<std::string, std::string>& mu);

/// Base names of the colours occurring in Φ.
std::set<std::string> colour_names(const Constellation& phi);

/// One edge per unordered pair of matchable ray addresses.
struct DependencyEdge {
  RayAddress a;
  RayAddress b;  // a < b
  /// Most general unifier of ⌊a⌋ ≐ ⌊b⌋ with b renamed apart, if any.
  std::optional<Substitution> mgu;
};

class DependencyGraph {
 public:
  DependencyGraph() = default;
  DependencyGraph(const Constellation& phi, const ColourSet& colours);

  std::size_t vertex_count() const { return ray_counts_.size(); }
  const std::vector<DependencyEdge>& edges() const { return edges_; }
  /// Indices of the edges incident to a ray address.
  const std::vector<std::size_t>& incident(const RayAddress& r) const;
  bool linkable(const RayAddress& r) const { return !incident(r).empty(); }
  /// The other endpoint of edge e seen from r.
  RayAddress other_end(std::size_t e, const RayAddress& r) const;
  std::size_t ray_count(std::size_t star) const { return ray_counts_[star]; }
  const ColourSet& colours() const { return colours_; }

  /// Connected components of stars (vertex lists sorted ascending).
  std::vector<std::vector<std::size_t>> components() const;
  bool acyclic() const;
  bool connected() const;
  /// First cycle found, as the sequence of edge indices, if any.
  std::optional<std::vector<std::size_t>> find_cycle() const;

  std::string to_dot(const Constellation& phi) const;

 private:
  std::vector<std::size_t> ray_counts_;
  std::vector<std::size_t> ray_base_;
  std::vector<DependencyEdge> edges_;
  std::vector<std::vector<std::size_t>> incidence_;  // per flattened ray address
  ColourSet colours_;
};

struct PropertyReport {
  bool exact = true;
  bool acyclic = true;
  bool connected = true;
  bool monovalent = true;
  std::string colours;
};

PropertyReport analyze(const Constellation& phi, const ColourSet& colours);

/// A variable occurrence X^i_j: variable X of ray j in star i.
struct VariableOccurrence {
  std::size_t star = 0;
  std::size_t ray = 0;
  Var var;
  friend bool operator==(const VariableOccurrence&, const VariableOccurrence&) = default;
  friend auto operator<=>(const VariableOccurrence&, const VariableOccurrence&) = default;
};

/// Φ1 ⋒_A Φ2: occurrences (indexed in Φ1 ⊎ Φ2) accessible by dependency paths
/// from a star of Φ1 and from a star of Φ2.  A path alternates edges and
/// stars and leaves a star through a ray other than the one it entered by;
/// an occurrence is accessible when the final edge touches its ray.
std::set<VariableOccurrence> shared_variables(const Constellation& phi1, const Constellation& phi2,
                                              const ColourSet& colours);
/// Same relation for an arbitrary partition of one constellation into groups.
std::set<VariableOccurrence> shared_variables(const Constellation& phi,
                                              const std::vector<std::vector<std::size_t>>& groups,
                                              const ColourSet& colours);

}  // namespace stellar
