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

namespace stellar {

// ---------------------------------------------------------------------------
// Logic programs

/// B :- A1, ..., Am.
struct Rule {
  std::vector<Term> body;
  Term head;
};

/// Facts and rules over plain (uncoloured) atoms with a predicate head.
struct LogicProgram {
  std::vector<Term> facts;
  std::vector<Rule> rules;
};

/// fact A ↦ [+A]; rule A1..Am ⊢ B ↦ [-A1, ..., -Am, +B].
/// Throws std::invalid_argument on coloured atoms or variables as atoms.
Constellation encode_logic_program(const LogicProgram& program);
/// ?A ↦ [-A, X1, ..., Xk] with the query variables as visible rays.
Star encode_query(const Term& query);
/// Rules whose head mentions a variable absent from the body.
std::vector<std::string> logic_program_warnings(const LogicProgram& program);

/// A logic-program file: either a plain constellation or the line-oriented
/// sugar `fact A`, `rule A1, ..., Am => B`, `query A`.
struct LogicProgramSource {
  Constellation program;
  std::optional<Term> query;
  std::vector<std::string> warnings;
};
/// Throws ParseError.
LogicProgramSource parse_logic_program(std::string_view text);

/// ♭↯Ex(P★ + q★): derivations that leave a goal unproven keep a coloured
/// ray and are concealed.  Each answer star lists the query variables
/// instantiated.
ExecutionResult run_logic_program(const Constellation& program, const Term& query, EngineOptions options = {});
ExecutionResult run_logic_program(const LogicProgram& program, const Term& query, EngineOptions options = {});

// ---------------------------------------------------------------------------
// Non-deterministic Turing machines

enum class Move { left, right, stay };

/// δ(state, read) ∋ (next, write, move).  Symbols are tape tokens; "_" and
/// "␣" both denote the blank.
struct Transition {
  std::string state;
  std::string read;
  std::string next;
  std::string write;
  Move move = Move::stay;
};

struct TuringMachine {
  std::string initial;
  std::string accept;
  std::string reject;
  std::vector<Transition> transitions;

  /// Throws std::invalid_argument when accept = reject, a halting state has
  /// outgoing transitions or a state name is not a valid symbol.
  void validate() const;
};

/// Lines `state symbol -> state' symbol' L|R|S` and headers `init: q`,
/// `accept: q`, `reject: q`; '#' starts a comment.  Throws ParseError.
TuringMachine parse_turing_machine(std::string_view text);

/// The constant standing for a tape token: the blank for "_"/"␣", the token
/// itself when it is a symbol name, otherwise a spelled-out name.
Term tape_symbol(std::string_view token);

/// The tape constructor: the word cons and the right-hand stack share it.
Term tape_cons(Term head, Term tail);

/// w★ = [+i(c1 ∘ ... ∘ cn ∘ ␣)], one symbol per code point of w.
Constellation encode_word(std::string_view word);
/// Initial stars, one binary star per transition, the acc/rej stars and the
/// two allocation stars, in that order.
Constellation encode_ntm(const TuringMachine& machine);

enum class TmVerdict { accept, reject, unknown };
std::string to_string(TmVerdict verdict);

struct TmRun {
  TmVerdict verdict = TmVerdict::unknown;
  /// ♭↯Ex(M★ + w★).
  Constellation output;
  ExecutionResult execution;
};

/// Accept iff [acc] occurs in the output; reject iff it does not, the output
/// is non-empty and the enumeration was complete; unknown otherwise.
TmRun run_ntm(const TuringMachine& machine, std::string_view word, EngineOptions options = {});

// ---------------------------------------------------------------------------
// Abstract tile assembly

struct Glue {
  std::string label;
  unsigned strength = 0;
  friend bool operator==(const Glue&, const Glue&) = default;
};

struct TileType {
  std::string name;
  Glue west, east, south, north;
};

struct TileSystem {
  std::vector<TileType> tiles;
  unsigned temperature = 1;
};

/// Lines `tile NAME west=LBL:STR east=LBL:STR south=LBL:STR north=LBL:STR`
/// (a side written `-` is the null glue of strength 0) and `temp: τ`.
/// Throws ParseError.
TileSystem parse_tile_system(std::string_view text);

/// gl(g)(X) = g(X) · n̄ where n = str(g).
Term glue_term(const Glue& glue, const Term& coordinate);
/// [-h•(gl(w)(X), X, Y), -v•(gl(s)(Y), X, Y), +h∘(gl(e)(s(X)), s(X), Y), +v∘(gl(n)(s(Y)), X, s(Y))].
Star encode_tile(const TileType& tile);
/// T★: one star per tile type, in order.
Constellation encode_tiles(const TileSystem& system);
/// Φ_env^τ: temperature star, connector, the eight fillers, geq and add stars.
Constellation environment(unsigned temperature);
/// T★ + Φ_env^τ.
Constellation encode_tile_system(const TileSystem& system);

struct PlacedTile {
  std::size_t tile = 0;  // index into TileSystem::tiles
  long x = 0;
  long y = 0;
  friend bool operator==(const PlacedTile&, const PlacedTile&) = default;
  friend auto operator<=>(const PlacedTile&, const PlacedTile&) = default;
};

struct Assembly {
  Diagram diagram;
  /// Tiles sorted by position; coordinates relative to the first tile of the
  /// diagram.  Only meaningful when `anchored`.
  std::vector<PlacedTile> placement;
  /// All tile coordinates are expressed over one common origin.
  bool anchored = true;
};

struct AssemblyResult {
  std::vector<Assembly> assemblies;
  bool complete = true;
  std::string incomplete_reason;
  std::size_t diagrams_explored = 0;
};

/// Correct saturated diagrams of T★ + Φ_env^τ with between 1 and max_tiles
/// tile vertices, rendered as placements.  Identical stars of the encoding
/// are merged first: assemblies form a set.
AssemblyResult enumerate_assemblies(const TileSystem& system, std::size_t max_tiles, EngineOptions options = {});

/// Bonds of a placement: adjacent tiles whose facing glues agree (label and
/// strength) with positive strength.
struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;  // indices into the placement
  unsigned strength = 0;
};
std::vector<Bond> placement_bonds(const TileSystem& system, const std::vector<PlacedTile>& placement);
/// No two tiles share a cell and every cut of the bond graph into two
/// non-empty parts breaks bonds of total strength ≥ τ.
bool is_tau_stable(const TileSystem& system, const std::vector<PlacedTile>& placement);
/// Text grid of the placement (north up).
std::string render_placement(const TileSystem& system, const std::vector<PlacedTile>& placement);

}  // namespace stellar
