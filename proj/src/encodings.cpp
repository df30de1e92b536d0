#include "stellar/encodings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/connected_components.hpp>
#include <boost/graph/stoer_wagner_min_cut.hpp>
#include <boost/property_map/property_map.hpp>

#include "stellar/syntax.hpp"

namespace stellar {

namespace {

Term var(std::string_view name) { return Term::variable(name); }
Term constant(std::string_view name) { return Term::constant(name); }
Term pos(std::string_view colour, std::vector<Term> args) {
  return Term::application(colour, std::move(args), Polarity::plus);
}
Term neg(std::string_view colour, std::vector<Term> args) {
  return Term::application(colour, std::move(args), Polarity::minus);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto nl = text.find('\n');
    out.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

std::vector<std::string_view> words_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Lower-case symbol name accepted by the term syntax.
bool is_symbol_name(std::string_view s) {
  if (s.empty()) return false;
  const unsigned char c = static_cast<unsigned char>(s.front());
  if (!(std::islower(c) || std::isdigit(c) || c == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
  });
}

std::size_t column_of(std::string_view line, std::string_view part) {
  std::size_t col = 1;
  for (const char* p = line.data(); p < part.data(); ++p) {
    if ((static_cast<unsigned char>(*p) & 0xC0) != 0x80) ++col;
  }
  return col;
}

/// Parses `part` (a slice of `line`) as a term and reports errors at their
/// position within the file.
Term parse_fragment(std::string_view line, std::string_view part, std::size_t line_no, Signature& signature) {
  try {
    return parse_term(part, signature);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), line_no, column_of(line, part) + e.column() - 1);
  }
}

/// Splits on commas outside parentheses.
std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

void check_atom(const Term& atom) {
  if (atom.is_variable()) throw std::invalid_argument("an atom cannot be a variable: " + atom.to_string());
  if (atom.is_coloured()) throw std::invalid_argument("atoms must be uncoloured: " + atom.to_string());
}

Term with_polarity(const Term& atom, Polarity p) {
  check_atom(atom);
  return Term::application(atom.symbol(), p, atom.args());
}

}  // namespace

// ---------------------------------------------------------------------------
// Logic programs

Constellation encode_logic_program(const LogicProgram& program) {
  Constellation phi;
  for (const auto& fact : program.facts) phi.stars.push_back(Star{with_polarity(fact, Polarity::plus)});
  for (const auto& rule : program.rules) {
    Star s;
    for (const auto& atom : rule.body) s.rays.push_back(with_polarity(atom, Polarity::minus));
    s.rays.push_back(with_polarity(rule.head, Polarity::plus));
    phi.stars.push_back(std::move(s));
  }
  return phi;
}

Star encode_query(const Term& query) {
  Star s{with_polarity(query, Polarity::minus)};
  for (const auto& v : variables(query)) s.rays.push_back(Term::variable(v));
  return s;
}

std::vector<std::string> logic_program_warnings(const LogicProgram& program) {
  std::vector<std::string> out;
  for (const auto& rule : program.rules) {
    std::vector<Var> body_vars;
    for (const auto& atom : rule.body) collect_variables(atom, body_vars);
    for (const auto& v : variables(rule.head)) {
      if (std::find(body_vars.begin(), body_vars.end(), v) == body_vars.end()) {
        out.push_back("variable " + var_to_string(v) + " of head " + rule.head.to_string() +
                      " does not occur in the body; answers may stay non-ground");
      }
    }
  }
  return out;
}

LogicProgramSource parse_logic_program(std::string_view text) {
  const auto lines = lines_of(text);
  bool sugar = false;
  for (auto line : lines) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto words = words_of(line);
    sugar = words.front() == "fact" || words.front() == "rule" || words.front() == "query";
    break;
  }
  LogicProgramSource out;
  Signature signature;
  if (!sugar) {
    out.program = parse_constellation(text, signature);
    return out;
  }
  LogicProgram program;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view raw = lines[n];
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.back() == '.') line = trim(line.substr(0, line.size() - 1));
    const std::size_t kw_end = std::min(line.find_first_of(" \t"), line.size());
    const std::string_view keyword = line.substr(0, kw_end);
    const std::string_view rest = trim(line.substr(kw_end));
    if (keyword == "fact") {
      program.facts.push_back(parse_fragment(raw, rest, n + 1, signature));
    } else if (keyword == "query") {
      if (out.query) throw ParseError("more than one query", n + 1, column_of(raw, line));
      out.query = parse_fragment(raw, rest, n + 1, signature);
    } else if (keyword == "rule") {
      const auto arrow = rest.find("=>");
      if (arrow == std::string_view::npos) {
        throw ParseError("a rule needs '=>' between its body and its head", n + 1, column_of(raw, rest));
      }
      Rule rule;
      const std::string_view body = trim(rest.substr(0, arrow));
      if (!body.empty()) {
        for (auto part : split_top_level(body)) rule.body.push_back(parse_fragment(raw, trim(part), n + 1, signature));
      }
      rule.head = parse_fragment(raw, trim(rest.substr(arrow + 2)), n + 1, signature);
      program.rules.push_back(std::move(rule));
    } else {
      throw ParseError("expected 'fact', 'rule' or 'query'", n + 1, column_of(raw, line));
    }
  }
  try {
    out.program = encode_logic_program(program);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 1, 1);
  }
  out.warnings = logic_program_warnings(program);
  return out;
}

ExecutionResult run_logic_program(const Constellation& program, const Term& query, EngineOptions options) {
  Constellation phi = program;
  phi.stars.push_back(encode_query(query));
  options.drop_empty = true;
  options.conceal = true;
  ExecutionResult result = execute(phi, options);
  // An answer leaves nothing unproven: stars keeping a coloured ray come from
  // derivations with an unresolved goal and are concealed, then ♭ applies.
  auto is_answer = [](const Star& s) {
    return !s.empty() && std::none_of(s.rays.begin(), s.rays.end(), [](const Term& r) { return r.is_coloured(); });
  };
  ExecutionResult filtered = result;
  filtered.stars.stars.clear();
  filtered.diagrams.clear();
  for (std::size_t i = 0; i < result.stars.size(); ++i) {
    if (!is_answer(result.stars[i])) continue;
    filtered.stars.stars.push_back(result.stars[i]);
    if (options.keep_diagrams) filtered.diagrams.push_back(result.diagrams[i]);
  }
  return filtered;
}

ExecutionResult run_logic_program(const LogicProgram& program, const Term& query, EngineOptions options) {
  return run_logic_program(encode_logic_program(program), query, std::move(options));
}

// ---------------------------------------------------------------------------
// Turing machines

namespace {

constexpr std::string_view blank_glyph = "\xE2\x90\xA3";  // ␣

Term blank() { return constant("_"); }

bool is_blank_token(std::string_view token) { return token == "_" || token == blank_glyph; }

void check_state(const std::string& state, std::string_view role) {
  if (!is_symbol_name(state)) {
    throw std::invalid_argument(std::string(role) + " state '" + state +
                                "' is not a symbol name (lower-case letter or digit first)");
  }
}

std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) {
      len = 4;
    } else if (c >= 0xE0) {
      len = 3;
    } else if (c >= 0xC0) {
      len = 2;
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

Move parse_move(std::string_view s) {
  if (s == "L") return Move::left;
  if (s == "R") return Move::right;
  if (s == "S") return Move::stay;
  throw std::invalid_argument("direction must be L, R or S");
}

}  // namespace

void TuringMachine::validate() const {
  check_state(initial, "initial");
  check_state(accept, "accepting");
  check_state(reject, "rejecting");
  if (accept == reject) throw std::invalid_argument("accepting and rejecting states must differ");
  for (const auto& t : transitions) {
    check_state(t.state, "source");
    check_state(t.next, "target");
    if (t.state == accept || t.state == reject) {
      throw std::invalid_argument("halting state " + t.state + " has an outgoing transition");
    }
  }
}

TuringMachine parse_turing_machine(std::string_view text) {
  TuringMachine m;
  const auto lines = lines_of(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view raw = lines[n];
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon != std::string_view::npos && line.find("->") == std::string_view::npos) {
      const std::string_view key = trim(line.substr(0, colon));
      const std::string value(trim(line.substr(colon + 1)));
      if (key == "init") {
        m.initial = value;
      } else if (key == "accept") {
        m.accept = value;
      } else if (key == "reject") {
        m.reject = value;
      } else {
        throw ParseError("unknown header '" + std::string(key) + "'", n + 1, column_of(raw, line));
      }
      continue;
    }
    const auto w = words_of(line);
    if (w.size() != 6 || w[2] != "->") {
      throw ParseError("expected 'state symbol -> state symbol L|R|S'", n + 1, column_of(raw, line));
    }
    Transition t{std::string(w[0]), std::string(w[1]), std::string(w[3]), std::string(w[4]), Move::stay};
    try {
      t.move = parse_move(w[5]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), n + 1, column_of(raw, w[5]));
    }
    m.transitions.push_back(std::move(t));
  }
  if (m.initial.empty()) throw ParseError("missing 'init:' header", 1, 1);
  if (m.accept.empty()) throw ParseError("missing 'accept:' header", 1, 1);
  if (m.reject.empty()) throw ParseError("missing 'reject:' header", 1, 1);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 1, 1);
  }
  return m;
}

Term tape_symbol(std::string_view token) {
  if (is_blank_token(token)) return blank();
  if (is_symbol_name(token)) return constant(token);
  static const std::map<std::string_view, std::string_view> names = {
      {"$", "dollar"}, {"#", "hash"}, {"*", "star"},  {"+", "plus"},  {"-", "minus"}, {"|", "bar"},
      {"!", "bang"},   {"@", "at"},   {"%", "percent"}, {"&", "amp"}, {"=", "equals"}, {"/", "slash"}};
  if (auto it = names.find(token); it != names.end()) return constant(it->second);
  std::ostringstream os;
  os << 'u';
  for (unsigned char c : token) os << std::hex << static_cast<int>(c);
  return constant(os.str());
}

Term tape_cons(Term head, Term tail) { return right_cons(std::move(head), std::move(tail)); }

Constellation encode_word(std::string_view word) {
  Term tape = blank();
  const auto symbols = code_points(word);
  for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) tape = tape_cons(tape_symbol(*it), tape);
  return Constellation{Star{pos("i", {tape})}};
}

Constellation encode_ntm(const TuringMachine& machine) {
  machine.validate();
  const Term L = var("L"), R = var("R"), X = var("X"), C = var("C"), W = var("W"), Q = var("Q");
  auto m = [](Polarity p, Term l, Term q, Term c, Term r) {
    return Term::application("m", {std::move(l), std::move(q), std::move(c), std::move(r)}, p);
  };
  const Polarity plus = Polarity::plus, minus = Polarity::minus;
  const Term q0 = constant(machine.initial);
  Constellation phi;
  phi.stars.push_back(Star{neg("i", {tape_cons(C, W)}), m(plus, blank(), q0, C, W)});
  phi.stars.push_back(Star{neg("i", {blank()}), m(plus, blank(), q0, blank(), blank())});
  for (const auto& t : machine.transitions) {
    const Term q = constant(t.state), q2 = constant(t.next);
    const Term c = tape_symbol(t.read), c2 = tape_symbol(t.write);
    switch (t.move) {
      case Move::left:
        phi.stars.push_back(Star{m(minus, left_cons(L, X), q, c, R), m(plus, L, q2, X, tape_cons(c2, R))});
        break;
      case Move::right:
        phi.stars.push_back(Star{m(minus, L, q, c, tape_cons(X, R)), m(plus, left_cons(L, c2), q2, X, R)});
        break;
      case Move::stay:
        phi.stars.push_back(Star{m(minus, L, q, c, R), m(plus, L, q2, c2, R)});
        break;
    }
  }
  phi.stars.push_back(Star{m(minus, L, constant(machine.accept), X, R), constant("acc")});
  phi.stars.push_back(Star{m(minus, L, constant(machine.reject), X, R), constant("rej")});
  phi.stars.push_back(Star{m(minus, blank(), Q, C, R), m(plus, left_cons(blank(), blank()), Q, C, R)});
  phi.stars.push_back(Star{m(minus, L, Q, C, blank()), m(plus, L, Q, C, tape_cons(blank(), blank()))});
  return phi;
}

std::string to_string(TmVerdict verdict) {
  switch (verdict) {
    case TmVerdict::accept:
      return "ACCEPT";
    case TmVerdict::reject:
      return "REJECT";
    case TmVerdict::unknown:
      break;
  }
  return "UNKNOWN";
}

TmRun run_ntm(const TuringMachine& machine, std::string_view word, EngineOptions options) {
  const Constellation phi = disjoint_union(encode_ntm(machine), encode_word(word));
  options.drop_empty = true;
  options.conceal = true;
  TmRun run;
  run.execution = execute(phi, options);
  run.output = filter_noise(conceal(run.execution.stars));
  const Star acc{constant("acc")};
  const bool accepted = std::any_of(run.output.stars.begin(), run.output.stars.end(),
                                    [&](const Star& s) { return s == acc; });
  if (accepted) {
    run.verdict = TmVerdict::accept;
  } else if (!run.output.empty() && run.execution.complete) {
    run.verdict = TmVerdict::reject;
  } else {
    run.verdict = TmVerdict::unknown;
  }
  return run;
}

// ---------------------------------------------------------------------------
// Abstract tile assembly

namespace {

constexpr std::string_view h_dot = "hdot";    // h•
constexpr std::string_view h_ring = "hring";  // h∘
constexpr std::string_view v_dot = "vdot";    // v•
constexpr std::string_view v_ring = "vring";  // v∘

const std::set<std::string_view>& reserved_symbols() {
  static const std::set<std::string_view> names = {"s", "0", "add", "geq", "temp", h_dot, h_ring, v_dot, v_ring};
  return names;
}

Term succ(Term t) { return Term::application("s", {std::move(t)}); }

Glue parse_glue(std::string_view spec) {
  if (spec == "-") return Glue{"null", 0};
  const auto colon = spec.rfind(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("glue must be LABEL:STRENGTH or -");
  Glue g;
  g.label = std::string(spec.substr(0, colon));
  const auto digits = spec.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), g.strength);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("glue strength must be a natural number");
  }
  if (!is_symbol_name(g.label) || reserved_symbols().count(g.label)) {
    throw std::invalid_argument("glue label '" + g.label + "' is not a free symbol name");
  }
  return g;
}

}  // namespace

TileSystem parse_tile_system(std::string_view text) {
  TileSystem system;
  bool have_temp = false;
  const auto lines = lines_of(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view raw = lines[n];
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto w = words_of(line);
    if (w.front() == "temp:" || w.front().substr(0, 5) == "temp:") {
      std::string_view value = w.front() == "temp:" ? (w.size() > 1 ? w[1] : "") : w.front().substr(5);
      unsigned t = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), t);
      if (ec != std::errc() || ptr != value.data() + value.size() || t == 0) {
        throw ParseError("temperature must be a positive natural number", n + 1, column_of(raw, line));
      }
      system.temperature = t;
      have_temp = true;
      continue;
    }
    if (w.front() != "tile" || w.size() != 6) {
      throw ParseError("expected 'tile NAME west=.. east=.. south=.. north=..' or 'temp: N'", n + 1,
                       column_of(raw, line));
    }
    TileType tile;
    tile.name = std::string(w[1]);
    std::set<std::string_view> seen;
    for (std::size_t i = 2; i < 6; ++i) {
      const auto eq = w[i].find('=');
      const std::string_view side = w[i].substr(0, eq);
      if (eq == std::string_view::npos || !seen.insert(side).second) {
        throw ParseError("each side must be given once as SIDE=GLUE", n + 1, column_of(raw, w[i]));
      }
      Glue g;
      try {
        g = parse_glue(w[i].substr(eq + 1));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), n + 1, column_of(raw, w[i]));
      }
      if (side == "west") {
        tile.west = g;
      } else if (side == "east") {
        tile.east = g;
      } else if (side == "south") {
        tile.south = g;
      } else if (side == "north") {
        tile.north = g;
      } else {
        throw ParseError("unknown side '" + std::string(side) + "'", n + 1, column_of(raw, w[i]));
      }
    }
    system.tiles.push_back(std::move(tile));
  }
  if (!have_temp) throw ParseError("missing 'temp:' line", 1, 1);
  return system;
}

Term glue_term(const Glue& glue, const Term& coordinate) {
  return cons(Term::application(glue.label, {coordinate}), encode_nat(glue.strength));
}

Star encode_tile(const TileType& tile) {
  const Term X = var("X"), Y = var("Y");
  return Star{neg(h_dot, {glue_term(tile.west, X), X, Y}), neg(v_dot, {glue_term(tile.south, Y), X, Y}),
              pos(h_ring, {glue_term(tile.east, succ(X)), succ(X), Y}),
              pos(v_ring, {glue_term(tile.north, succ(Y)), X, succ(Y)})};
}

Constellation encode_tiles(const TileSystem& system) {
  Constellation phi;
  for (const auto& t : system.tiles) phi.stars.push_back(encode_tile(t));
  return phi;
}

Constellation environment(unsigned temperature) {
  Constellation phi;
  phi.stars.push_back(Star{pos("temp", {encode_nat(temperature)})});
  // Connector: four pairs of opposite sides.  Both rays of a pair share the
  // glue term, the strength and the coordinates of the bond they certify.
  auto side = [](std::string_view colour, Polarity p, int i) {
    const std::string k = std::to_string(i);
    return Term::application(colour, {cons(var("K" + k), var("N" + k)), var("X" + k), var("Y" + k)}, p);
  };
  const Polarity plus = Polarity::plus, minus = Polarity::minus;
  phi.stars.push_back(Star{side(v_dot, plus, 1), side(v_ring, minus, 2), side(h_dot, plus, 3), side(h_ring, minus, 4),
                           side(v_ring, minus, 1), side(v_dot, plus, 2), side(h_ring, minus, 3), side(h_dot, plus, 4),
                           neg("add", {var("N1"), var("N2"), var("R1")}),
                           neg("add", {var("N3"), var("N4"), var("R2")}),
                           neg("add", {var("R1"), var("R2"), var("R")}),
                           neg("geq", {var("R"), var("T"), encode_nat(1)}), neg("temp", {var("T")})});
  auto filler = [](std::string_view colour, Polarity p) {
    return Star{Term::application(colour, {cons(var("K"), encode_nat(0)), var("X"), var("Y")}, p)};
  };
  phi.stars.push_back(filler(v_dot, minus));
  phi.stars.push_back(filler(v_ring, plus));
  phi.stars.push_back(filler(h_dot, minus));
  phi.stars.push_back(filler(h_ring, plus));
  phi.stars.push_back(filler(v_ring, plus));
  phi.stars.push_back(filler(v_dot, minus));
  phi.stars.push_back(filler(h_ring, plus));
  phi.stars.push_back(filler(h_dot, minus));
  const Term X = var("X"), Y = var("Y"), R = var("R"), Z = var("Z");
  const Term zero = encode_nat(0), one = encode_nat(1);
  phi.stars.push_back(Star{pos("geq", {zero, zero, one})});
  phi.stars.push_back(Star{pos("geq", {succ(X), succ(Y), R}), neg("geq", {X, Y, R})});
  phi.stars.push_back(Star{pos("geq", {succ(X), zero, zero})});
  phi.stars.push_back(Star{pos("geq", {zero, succ(Y), zero})});
  phi.stars.push_back(Star{pos("add", {zero, Y, Y})});
  phi.stars.push_back(Star{neg("add", {X, Y, Z}), pos("add", {succ(X), Y, succ(Z)})});
  return phi;
}

Constellation encode_tile_system(const TileSystem& system) {
  for (const auto& t : system.tiles) {
    for (const Glue* g : {&t.west, &t.east, &t.south, &t.north}) {
      if (!is_symbol_name(g->label) || reserved_symbols().count(g->label)) {
        throw std::invalid_argument("glue label '" + g->label + "' is not a free symbol name");
      }
    }
  }
  if (system.temperature == 0) throw std::invalid_argument("temperature must be at least 1");
  return disjoint_union(encode_tiles(system), environment(system.temperature));
}

namespace {

/// Splits an s-tower s^k(base) into (base, k).
std::pair<Term, long> tower(const Term& t) {
  Term cur = t;
  long k = 0;
  while (!cur.is_variable() && symbol_name(cur.symbol()) == "s" && cur.arity() == 1) {
    cur = cur.args()[0];
    ++k;
  }
  return {cur, k};
}

}  // namespace

AssemblyResult enumerate_assemblies(const TileSystem& system, std::size_t max_tiles, EngineOptions options) {
  const Constellation full = encode_tile_system(system);
  // Identical stars only multiply diagrams; an assembly is counted once.
  Constellation phi;
  std::vector<std::size_t> origin;  // star of `phi` -> star of `full`
  for (std::size_t i = 0; i < full.size(); ++i) {
    const bool duplicate = std::any_of(phi.stars.begin(), phi.stars.end(),
                                       [&](const Star& s) { return alpha_equivalent(s, full[i]); });
    if (i < system.tiles.size() || !duplicate) {
      phi.stars.push_back(full[i]);
      origin.push_back(i);
    }
  }
  options.keep_diagrams = true;
  options.marked.assign(phi.size(), false);
  std::fill_n(options.marked.begin(), system.tiles.size(), true);
  options.max_marked = max_tiles;
  options.require_marked = true;
  const ExecutionResult ex = enumerate_saturated(phi, options);
  AssemblyResult out;
  out.complete = ex.complete;
  out.incomplete_reason = ex.incomplete_reason == "star limit" ? "tile bound" : ex.incomplete_reason;
  out.diagrams_explored = ex.diagrams_explored;
  const std::size_t tiles = system.tiles.size();
  for (const auto& d : ex.diagrams) {
    std::vector<std::size_t> tile_vertices;
    for (std::size_t v = 0; v < d.size(); ++v) {
      if (origin[d.vertices[v]] < tiles) tile_vertices.push_back(v);
    }
    if (tile_vertices.empty() || tile_vertices.size() > max_tiles) continue;
    const SolveResult mgu = solve(underlying_problem(phi, d));
    if (!mgu) continue;
    Assembly a;
    a.diagram = d;
    a.diagram.vertices.clear();
    for (auto v : d.vertices) a.diagram.vertices.push_back(origin[v]);
    std::optional<Term> base_x, base_y;
    long x0 = 0, y0 = 0;
    for (std::size_t i = 0; i < tile_vertices.size(); ++i) {
      const std::size_t v = tile_vertices[i];
      // The west ray carries the tile's own coordinates.
      const Term west = mgu.unifier().apply(vertex_ray(phi, d, v, 0));
      const auto [bx, kx] = tower(west.args()[1]);
      const auto [by, ky] = tower(west.args()[2]);
      if (i == 0) {
        base_x = bx;
        base_y = by;
        x0 = kx;
        y0 = ky;
      } else if (!(bx == *base_x) || !(by == *base_y)) {
        a.anchored = false;
      }
      a.placement.push_back(PlacedTile{origin[d.vertices[v]], kx - x0, ky - y0});
    }
    std::sort(a.placement.begin(), a.placement.end(),
              [](const PlacedTile& p, const PlacedTile& q) {
                return std::tie(p.y, p.x, p.tile) < std::tie(q.y, q.x, q.tile);
              });
    out.assemblies.push_back(std::move(a));
  }
  return out;
}

std::vector<Bond> placement_bonds(const TileSystem& system, const std::vector<PlacedTile>& placement) {
  std::vector<Bond> bonds;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    for (std::size_t j = 0; j < placement.size(); ++j) {
      const auto& p = placement[i];
      const auto& q = placement[j];
      const TileType& a = system.tiles[p.tile];
      const TileType& b = system.tiles[q.tile];
      if (q.x == p.x + 1 && q.y == p.y && a.east == b.west && a.east.strength > 0) {
        bonds.push_back(Bond{i, j, a.east.strength});
      }
      if (q.x == p.x && q.y == p.y + 1 && a.north == b.south && a.north.strength > 0) {
        bonds.push_back(Bond{i, j, a.north.strength});
      }
    }
  }
  return bonds;
}

bool is_tau_stable(const TileSystem& system, const std::vector<PlacedTile>& placement) {
  if (placement.empty()) return false;
  for (std::size_t i = 0; i < placement.size(); ++i) {
    for (std::size_t j = i + 1; j < placement.size(); ++j) {
      if (placement[i].x == placement[j].x && placement[i].y == placement[j].y) return false;
    }
  }
  if (placement.size() == 1) return true;
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                      boost::property<boost::edge_weight_t, long>>;
  Graph g(placement.size());
  for (const auto& b : placement_bonds(system, placement)) boost::add_edge(b.a, b.b, static_cast<long>(b.strength), g);
  std::vector<int> component(placement.size());
  if (boost::connected_components(g, component.data()) != 1) return false;
  const long cut = boost::stoer_wagner_min_cut(g, boost::get(boost::edge_weight, g));
  return cut >= static_cast<long>(system.temperature);
}

std::string render_placement(const TileSystem& system, const std::vector<PlacedTile>& placement) {
  if (placement.empty()) return "";
  long min_x = placement.front().x, max_x = min_x, min_y = placement.front().y, max_y = min_y;
  std::size_t width = 1;
  for (const auto& p : placement) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
    width = std::max(width, system.tiles[p.tile].name.size());
  }
  std::ostringstream os;
  for (long y = max_y; y >= min_y; --y) {
    for (long x = min_x; x <= max_x; ++x) {
      std::string cell = ".";
      for (const auto& p : placement) {
        if (p.x == x && p.y == y) cell = cell == "." ? system.tiles[p.tile].name : "!";
      }
      os << cell << std::string(width - cell.size() + (x < max_x ? 1 : 0), ' ');
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace stellar
