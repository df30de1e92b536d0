#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stellar/constellation.hpp"
#include "stellar/engine.hpp"
#include "stellar/term.hpp"

namespace stellar::mll {

// ---------------------------------------------------------------------------
// Formulas

/// MLL formula: an atom X or X⊥, or a binary tensor / par.
struct Formula {
  enum class Kind { atom, tensor, par };

  Kind kind = Kind::atom;
  std::string atom;      // atom name (Kind::atom)
  bool negated = false;  // X⊥ (Kind::atom)
  std::vector<Formula> sub;  // left, right (Kind::tensor / Kind::par)

  static Formula variable(std::string name, bool negated = false);
  static Formula tensor(Formula a, Formula b);
  static Formula par(Formula a, Formula b);

  bool is_atom() const { return kind == Kind::atom; }
  /// Linear negation, pushed to the atoms by De Morgan.
  Formula dual() const;
  /// Unicode rendering: X1⊥ ⅋ (X2 ⊗ X3).
  std::string to_string() const;
  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Grammar (a chain may not mix ⊗ and ⅋ without parentheses):
///   formula := unit (op unit)*        op := '⊗' | '*'  |  '⅋' | '|'
///   unit    := '~' unit | '(' formula ')' ['⊥' | '^⊥' | "'"] | NAME ['⊥' | '^⊥' | "'"]
/// Negating a compound formula applies De Morgan.  Throws ParseError.
Formula parse_formula(std::string_view text);

/// One formula of a sequent together with the symbol naming its conclusion.
struct SequentFormula {
  std::string name;
  Formula formula;
};
using Sequent = std::vector<SequentFormula>;

/// `[⊢] [NAME:] A, [NAME:] B, ...`; unnamed conclusions are called p1, p2, ...
/// by position.  Throws ParseError.
Sequent parse_sequent(std::string_view text);
std::string to_string(const Sequent& gamma);

// ---------------------------------------------------------------------------
// Proof-structures

using VertexId = unsigned;

enum class EdgeKind { ax, cut, tensor, par };
std::string to_string(EdgeKind kind);

struct Hyperedge {
  EdgeKind kind = EdgeKind::ax;
  std::vector<VertexId> sources;  // (left, right) for tensor, par and cut
  std::vector<VertexId> targets;
  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

struct ProofStructure {
  std::vector<VertexId> vertices;
  std::vector<Hyperedge> edges;
  /// Optional formula labels.
  std::map<VertexId, Formula> labels;

  /// Index of the hyperedge whose target is v, if any.
  std::optional<std::size_t> target_of(VertexId v) const;
  /// Index of the hyperedge having v as a source, if any.
  std::optional<std::size_t> source_of(VertexId v) const;
  /// Concl(S): vertices that are the source of no hyperedge, ascending.
  std::vector<VertexId> conclusions() const;
  /// Conclusions once the cut hyperedges are erased, ascending.
  std::vector<VertexId> cut_free_conclusions() const;
  /// Atoms(S): targets of axioms, ascending.
  std::vector<VertexId> atoms() const;
  /// Indices of the hyperedges of a kind, in order.
  std::vector<std::size_t> edges_of(EdgeKind kind) const;
};

/// Every structural constraint; one message per violation (empty when valid).
std::vector<std::string> validate(const ProofStructure& s);

/// JSON record `{"vertices": [...], "edges": [{"kind", "sources", "targets"}],
/// "labels": {"v": "formula"}}`.  Throws ParseError (malformed input) or
/// std::invalid_argument (unknown edge kind, bad label).
ProofStructure parse_proof_structure(std::string_view json_text);
std::string to_json(const ProofStructure& s);

/// Labelling read off the structure: axiom k gets Xk and Xk⊥, tensor and par
/// vertices the connective of their premises.
std::map<VertexId, Formula> synthesize_labels(const ProofStructure& s);
/// Label consistency (axioms dual, connectives matching, cuts dual); one
/// message per violation.  Unlabelled vertices are not checked.
std::vector<std::string> check_labels(const ProofStructure& s, const std::map<VertexId, Formula>& labels);

// ---------------------------------------------------------------------------
// Addresses and translation

/// The symbol p_v naming vertex v.
std::string vertex_symbol(VertexId v);

/// Path from a conclusion of the cut-erased structure up to an atom; the
/// first letter is the step nearest to the conclusion.
struct Address {
  VertexId conclusion = 0;
  std::string path;  // over {l, r}
  friend bool operator==(const Address&, const Address&) = default;
};

/// Throws std::invalid_argument when v is not an atom.
Address address(const ProofStructure& s, VertexId v);
/// p(w1 · ... · wn · tail).
Term locus(std::string_view symbol, std::string_view path, const Term& tail);
/// addr(v, X) = p_c(path · X).
Term address_ray(const ProofStructure& s, VertexId v);

/// One uncoloured binary star per axiom over the two addresses.
Constellation vehicle(const ProofStructure& s);
/// One uncoloured binary star [p_u(X), p_v(X)] per cut.
Constellation cuts(const ProofStructure& s);
/// +c·vehicle ⊎ -c·cuts.
Constellation comp(const ProofStructure& s);

/// Ex(comp(S)) with the colour c active.
ExecutionResult normalise_via_execution(const ProofStructure& s, EngineOptions options = {});

// ---------------------------------------------------------------------------
// Cut-elimination as hypergraph rewriting

/// One reduction step on the first reducible cut (ax/cut contraction or
/// ⊗/⅋ rewiring); nullopt when no cut is reducible.
std::optional<ProofStructure> reduce(const ProofStructure& s);
/// Reduces until no cut is reducible.
ProofStructure normal_form(const ProofStructure& s);

// ---------------------------------------------------------------------------
// Switchings and tests

enum class Side { left, right };

/// A side for every par hyperedge, keyed by hyperedge index.
struct Switching {
  std::map<std::size_t, Side> choice;
  std::string to_string() const;
};

/// All 2^#par switchings, the first one choosing left everywhere.
std::vector<Switching> switchings(const ProofStructure& s);

/// S^φ as an undirected bipartite graph: nodes 0..|V|-1 are the vertices (in
/// the order of s.vertices), the next ones the hyperedges; each par is
/// connected to its target and to its selected premise only.
struct CorrectnessGraph {
  std::size_t vertex_nodes = 0;
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  bool acyclic() const;
  bool connected() const;
  /// Node sequence of a cycle, if any.
  std::optional<std::vector<std::size_t>> find_cycle() const;
};
CorrectnessGraph correctness_graph(const ProofStructure& s, const Switching& phi);

/// The test constellation of S^φ (atom, tensor, switched par with a
/// one-ray star for the dropped premise, conclusion and cut stars).
Constellation test_of(const ProofStructure& s, const Switching& phi);
/// The +t-coloured vehicle.
Constellation tested_vehicle(const ProofStructure& s);

enum class Status { mll_correct, mix_only, incorrect, unknown };
std::string to_string(Status status);

struct SwitchingEvidence {
  Switching switching;
  bool acyclic = true;
  /// Vertices along a cycle of S^φ when it is cyclic.
  std::vector<VertexId> cycle;
  /// Ex(+t·vehicle ⊎ test) when the switching is acyclic.
  std::optional<ExecutionResult> execution;
  /// The execution is exactly the star of the conclusions.
  bool conclusions_star = false;
};

struct Verdict {
  Status status = Status::unknown;
  std::vector<SwitchingEvidence> evidence;
  /// The star [p_v1(X), ..., p_vn(X)] of the conclusions.
  Star conclusions;
};

/// The stellar correctness criterion: cyclic dependency graph for some
/// switching ⇒ incorrect; otherwise MLL-correct when every execution is the
/// conclusions star, MIX-only when not.
Verdict check(const ProofStructure& s, EngineOptions options = {});

// ---------------------------------------------------------------------------
// Orthogonality and typing

enum class Relation { fin, one, R };
std::optional<Relation> parse_relation(std::string_view text);
std::string to_string(Relation rel);

enum class Answer { yes, no, unknown };
std::string to_string(Answer answer);

struct Orthogonality {
  Answer answer = Answer::unknown;
  ExecutionResult execution;
  /// A found diagram contains a cycle, hence infinitely many saturated
  /// correct diagrams exist.
  bool infinite_witness = false;
  std::string reason;
};

/// Φ1 ⊥ Φ2 under the relation, computed on Ex(Φ1 ⊎ Φ2).
Orthogonality orthogonal(const Constellation& phi1, const Constellation& phi2, Relation rel,
                         EngineOptions options = {});

/// Symbol of every vertex of the syntax forest of Γ: the conclusion name at
/// the root, then name_l / name_r ... towards the atoms.
struct SyntaxNode {
  std::string symbol;
  std::string conclusion;  // symbol of the root
  std::string path;        // over {l, r}, from the root
  Formula formula;
  int left = -1;
  int right = -1;
};
std::vector<SyntaxNode> syntax_forest(const Sequent& gamma);

/// One test per switching of the syntax forest; atoms get no star.
std::vector<Constellation> sequent_tests(const Sequent& gamma);
/// The bridging star [op(from), op(to)].
Star adapter(const Term& from, const Term& to);
/// One adapter per atom occurrence of Γ: [-t(p_c(path·X)), +c(p_a(g·X))].
Constellation sequent_adapters(const Sequent& gamma);
/// Addresses p_c(path·X) of the atom occurrences of Γ, in syntax order.
std::vector<Term> sequent_addresses(const Sequent& gamma);
/// Binary stars whose rays, colours stripped, cover every atom address of Γ
/// exactly once (which atoms are linked is not checked).
bool proof_like(const Constellation& phi, const Sequent& gamma);

struct TypeCheck {
  Answer answer = Answer::unknown;
  bool proof_like = false;
  /// One result per sequent test.
  std::vector<Orthogonality> tests;
};

/// Φ : ⊢ Γ iff Φ (uncoloured rays wrapped into +t) is orthogonal to every
/// sequent test extended with the adapters.
TypeCheck type_check(const Constellation& phi, const Sequent& gamma, Relation rel, EngineOptions options = {});

}  // namespace stellar::mll
