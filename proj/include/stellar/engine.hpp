#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stellar/constellation.hpp"
#include "stellar/term.hpp"
#include "stellar/unify.hpp"

namespace stellar {

/// A link between ray `ray_u` of vertex `u` and ray `ray_v` of vertex `v`.
/// u == v is a loop between two distinct rays of the same vertex.
struct Link {
  std::size_t u = 0;
  std::size_t ray_u = 0;
  std::size_t v = 0;
  std::size_t ray_v = 0;
  friend bool operator==(const Link&, const Link&) = default;
};

/// A finite connected multigraph whose vertices are labelled by star indices
/// of a constellation.  Every ray occurrence carries at most one link.
/// Vertex v renames the variables of its star into scope v + 1.
struct Diagram {
  std::vector<std::size_t> vertices;  // star index of each vertex
  std::vector<Link> links;

  std::size_t size() const { return vertices.size(); }
  /// Whether ray j of vertex v carries a link.
  bool is_linked(std::size_t v, std::size_t j) const;
  std::string to_string() const;
  std::string to_dot(const Constellation& phi) const;
};

/// Copy of ray r of the vertex's star with its variables renamed into the
/// vertex scope.
Term vertex_ray(const Constellation& phi, const Diagram& d, std::size_t v, std::size_t j);

/// Checks labels, ray indices, the one-link-per-ray rule, duality of linked
/// rays under A and connectedness.  Returns a description of the first
/// violation, if any.
std::optional<std::string> validate_diagram(const Constellation& phi, const Diagram& d, const ColourSet& colours);

/// One equation α_u⌊r⌋ ≐ α_v⌊r'⌋ per link.
UnificationProblem underlying_problem(const Constellation& phi, const Diagram& d);
bool is_correct(const Constellation& phi, const Diagram& d);
/// Free (unlinked) rays of a correct diagram, ordered by vertex then ray, with
/// the most general unifier applied.  Throws std::invalid_argument when the
/// diagram is not correct.
Star actualise(const Constellation& phi, const Diagram& d);
/// No free ray of the diagram has an incident edge in the dependency graph.
bool is_saturated(const Constellation& phi, const Diagram& d, const DependencyGraph& graph);

/// Diagram whose vertices are arbitrary stars; every ray remembers the
/// (vertex, ray) occurrence of the original diagram it descends from.
struct FusionDiagram {
  struct Node {
    std::vector<Term> rays;
    std::vector<std::pair<std::size_t, std::size_t>> origins;
  };
  std::vector<Node> nodes;
  /// Links between ray origins.
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>> links;

  /// The star of the single remaining node with rays in origin order.
  Star star() const;
};

FusionDiagram to_fusion_diagram(const Constellation& phi, const Diagram& d);
/// Contracts link `index`: solves its equation, merges the two endpoint
/// stars without the linked rays and applies the unifier to every node.
std::variant<FusionDiagram, Failure> fuse_step(const FusionDiagram& d, std::size_t index);

struct EngineOptions {
  ColourSet colours = ColourSet::all();
  /// Largest diagram considered.
  std::size_t max_vertices = 64;
  /// Budget of partial diagrams expanded before giving up (incomplete).
  std::size_t max_expansions = 250'000;
  /// Diagrams whose actualisation is necessarily empty may be skipped.  Used
  /// when the caller applies noise filtering anyway.
  bool drop_empty = false;
  /// Only stars without coloured rays are wanted (↯ applied by the engine):
  /// stars with a coloured ray that can never be linked are not used.
  bool conceal = false;
  /// Stars flagged here (by index) may occur at most `max_marked` times in
  /// one diagram; reaching the limit makes the result incomplete.
  std::vector<bool> marked;
  std::size_t max_marked = SIZE_MAX;
  /// Only diagrams with at least one marked star are wanted.
  bool require_marked = false;
  /// Worker threads used to explore independent roots.
  unsigned jobs = 1;
  /// Keep the saturated diagrams in the result.
  bool keep_diagrams = false;
};

struct ExecutionResult {
  Constellation stars;
  /// True iff the search provably found every correct saturated diagram.
  bool complete = true;
  /// Why the search is incomplete: "vertex bound", "star limit" or
  /// "expansion budget".
  std::string incomplete_reason;
  std::size_t diagrams_explored = 0;
  std::size_t diagrams_pruned = 0;
  std::size_t max_vertices = 0;
  /// Saturated correct diagrams, parallel to `stars`, when requested.
  std::vector<Diagram> diagrams;
};

/// All correct saturated diagrams (up to isomorphism) within the bound.
ExecutionResult enumerate_saturated(const Constellation& phi, const EngineOptions& options);
/// Ex_A(Φ): the actualisations of all correct saturated diagrams, sorted
/// canonically.  Empty stars are kept unless options.drop_empty is set.
ExecutionResult execute(const Constellation& phi, const EngineOptions& options = {});

/// ↯: keeps the stars without coloured rays.
Constellation conceal(const Constellation& phi);
/// ♭: drops the empty stars.
Constellation filter_noise(const Constellation& phi);

/// Canonical vertex numbering of a diagram (index = new number, value = old
/// vertex) together with its isomorphism-invariant code.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> canonical_form(const Diagram& d,
                                                                               const Constellation& phi);

}  // namespace stellar
