#include "stellar/mll.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "stellar/syntax.hpp"

namespace stellar::mll {

namespace {

constexpr std::string_view kTensor = "\xE2\x8A\x97";  // ⊗
constexpr std::string_view kPar = "\xE2\x85\x8B";     // ⅋
constexpr std::string_view kPerp = "\xE2\x8A\xA5";    // ⊥
constexpr std::string_view kTurnstile = "\xE2\x8A\xA2";  // ⊢

Term var_x() { return Term::variable("X"); }
Term guarded(const Term& tail) { return cons(Term::constant("g"), tail); }
Term coloured(std::string_view colour, Polarity p, const Term& r) {
  return Term::application(colour, {r}, p);
}
Term plus_c(const Term& r) { return coloured("c", Polarity::plus, r); }
Term minus_c(const Term& r) { return coloured("c", Polarity::minus, r); }
Term minus_t(const Term& r) { return coloured("t", Polarity::minus, r); }

/// Removes the unary colours wrapped around a ray.
Term strip_colours(Term r) {
  while (!r.is_variable() && r.polarity() != Polarity::none && r.arity() == 1) r = r.args()[0];
  return r;
}

// ---------------------------------------------------------------------------
// Formula parsing

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text, std::size_t column_offset = 0)
      : text_(text), offset_(column_offset) {}

  Formula parse_all() {
    Formula f = parse_chain();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, 1, offset_ + pos_ + 1);
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  /// 1 for tensor, 2 for par, 0 when no connective follows.
  int eat_connective() {
    if (eat(kTensor) || eat("*")) return 1;
    if (eat(kPar) || eat("|")) return 2;
    return 0;
  }
  bool eat_perp() {
    if (eat(kPerp) || eat("'")) return true;
    if (eat("^")) {
      eat(kPerp);
      return true;
    }
    return false;
  }

  Formula parse_chain() {
    Formula acc = parse_unit();
    int kind = 0;
    while (true) {
      const std::size_t save = pos_;
      const int c = eat_connective();
      if (c == 0) break;
      if (kind != 0 && c != kind) {
        pos_ = save;
        skip_space();
        fail("mixing tensor and par requires parentheses");
      }
      kind = c;
      Formula rhs = parse_unit();
      acc = c == 1 ? Formula::tensor(std::move(acc), std::move(rhs)) : Formula::par(std::move(acc), std::move(rhs));
    }
    return acc;
  }

  Formula parse_unit() {
    skip_space();
    if (eat("~")) return parse_unit().dual();
    Formula f;
    if (eat("(")) {
      f = parse_chain();
      if (!eat(")")) fail("expected ')'");
    } else {
      skip_space();
      const std::size_t start = pos_;
      if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          ++pos_;
        }
      }
      if (start == pos_) fail("expected an atom or '('");
      f = Formula::variable(std::string(text_.substr(start, pos_ - start)));
    }
    while (eat_perp()) f = f.dual();
    return f;
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

bool valid_symbol_name(std::string_view name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

void collect_atoms(const Formula& f, std::vector<std::string>& out) {
  if (f.is_atom()) {
    out.push_back(f.atom + (f.negated ? "-" : "+"));
    return;
  }
  for (const auto& s : f.sub) collect_atoms(s, out);
}

// ---------------------------------------------------------------------------
// Structures

std::vector<VertexId> sorted_unique(std::vector<VertexId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view k) {
  if (k == "ax") return EdgeKind::ax;
  if (k == "cut") return EdgeKind::cut;
  if (k == "tensor" || k == kTensor) return EdgeKind::tensor;
  if (k == "par" || k == kPar) return EdgeKind::par;
  return std::nullopt;
}

/// Lines and columns of a byte offset.
std::pair<std::size_t, std::size_t> position_of(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

bool stars_match(const Star& a, const Star& b) { return equivalent_up_to_ray_order(a, b); }

}  // namespace

// ---------------------------------------------------------------------------
// Formulas

Formula Formula::variable(std::string name, bool negated) {
  Formula f;
  f.kind = Kind::atom;
  f.atom = std::move(name);
  f.negated = negated;
  return f;
}

Formula Formula::tensor(Formula a, Formula b) {
  Formula f;
  f.kind = Kind::tensor;
  f.sub = {std::move(a), std::move(b)};
  return f;
}

Formula Formula::par(Formula a, Formula b) {
  Formula f;
  f.kind = Kind::par;
  f.sub = {std::move(a), std::move(b)};
  return f;
}

Formula Formula::dual() const {
  switch (kind) {
    case Kind::atom:
      return variable(atom, !negated);
    case Kind::tensor:
      return par(sub[0].dual(), sub[1].dual());
    case Kind::par:
      return tensor(sub[0].dual(), sub[1].dual());
  }
  return *this;
}

std::string Formula::to_string() const {
  if (is_atom()) return atom + (negated ? std::string(kPerp) : "");
  auto side = [](const Formula& f) { return f.is_atom() ? f.to_string() : "(" + f.to_string() + ")"; };
  return side(sub[0]) + " " + std::string(kind == Kind::tensor ? kTensor : kPar) + " " + side(sub[1]);
}

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse_all(); }

Sequent parse_sequent(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (text.substr(pos, kTurnstile.size()) == kTurnstile) {
    pos += kTurnstile.size();
  } else if (text.substr(pos, 2) == "|-") {
    pos += 2;
  }
  Sequent gamma;
  std::set<std::string> names;
  std::vector<std::string> atoms;
  std::size_t start = pos;
  auto flush = [&](std::size_t end) {
    std::string_view piece = text.substr(start, end - start);
    std::size_t offset = start;
    std::string name;
    // Optional `name:` prefix.
    const std::size_t colon = piece.find(':');
    if (colon != std::string_view::npos) {
      std::string_view raw = piece.substr(0, colon);
      const auto b = raw.find_first_not_of(" \t");
      const auto e = raw.find_last_not_of(" \t");
      name = b == std::string_view::npos ? "" : std::string(raw.substr(b, e - b + 1));
      if (!valid_symbol_name(name)) throw ParseError("invalid conclusion name '" + name + "'", 1, offset + 1);
      offset += colon + 1;
      piece = piece.substr(colon + 1);
    }
    if (piece.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw ParseError("empty formula in sequent", 1, offset + 1);
    }
    Formula f = FormulaParser(piece, offset).parse_all();
    if (name.empty()) name = "p" + std::to_string(gamma.size() + 1);
    if (!names.insert(name).second) throw ParseError("duplicate conclusion name '" + name + "'", 1, offset + 1);
    collect_atoms(f, atoms);
    gamma.push_back({name, std::move(f)});
  };
  int depth = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  if (text.substr(start).find_first_not_of(" \t\r\n") != std::string_view::npos || !gamma.empty()) flush(text.size());
  std::sort(atoms.begin(), atoms.end());
  if (std::adjacent_find(atoms.begin(), atoms.end()) != atoms.end()) {
    throw ParseError("every atom occurrence of the sequent must be distinct", 1, pos + 1);
  }
  return gamma;
}

std::string to_string(const Sequent& gamma) {
  std::string out = std::string(kTurnstile);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    out += i ? ", " : " ";
    out += gamma[i].name + ": " + gamma[i].formula.to_string();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proof-structures

std::string to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::ax:
      return "ax";
    case EdgeKind::cut:
      return "cut";
    case EdgeKind::tensor:
      return "tensor";
    case EdgeKind::par:
      return "par";
  }
  return "?";
}

std::optional<std::size_t> ProofStructure::target_of(VertexId v) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (std::find(edges[i].targets.begin(), edges[i].targets.end(), v) != edges[i].targets.end()) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ProofStructure::source_of(VertexId v) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (std::find(edges[i].sources.begin(), edges[i].sources.end(), v) != edges[i].sources.end()) return i;
  }
  return std::nullopt;
}

std::vector<VertexId> ProofStructure::conclusions() const {
  std::vector<VertexId> out;
  for (VertexId v : vertices) {
    if (!source_of(v)) out.push_back(v);
  }
  return sorted_unique(out);
}

std::vector<VertexId> ProofStructure::cut_free_conclusions() const {
  std::vector<VertexId> out;
  for (VertexId v : vertices) {
    const auto e = source_of(v);
    if (!e || edges[*e].kind == EdgeKind::cut) out.push_back(v);
  }
  return sorted_unique(out);
}

std::vector<VertexId> ProofStructure::atoms() const {
  std::vector<VertexId> out;
  for (const auto& e : edges) {
    if (e.kind == EdgeKind::ax) out.insert(out.end(), e.targets.begin(), e.targets.end());
  }
  return sorted_unique(out);
}

std::vector<std::size_t> ProofStructure::edges_of(EdgeKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].kind == kind) out.push_back(i);
  }
  return out;
}

std::vector<std::string> validate(const ProofStructure& s) {
  std::vector<std::string> errors;
  std::set<VertexId> known;
  for (VertexId v : s.vertices) {
    if (!known.insert(v).second) errors.push_back("vertex " + std::to_string(v) + " is listed twice");
  }
  std::map<VertexId, std::size_t> as_target, as_source;
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    const auto& e = s.edges[i];
    const std::string name = "hyperedge " + std::to_string(i) + " (" + to_string(e.kind) + ")";
    std::size_t want_sources = 2, want_targets = 1;
    if (e.kind == EdgeKind::ax) want_sources = 0, want_targets = 2;
    if (e.kind == EdgeKind::cut) want_targets = 0;
    if (e.sources.size() != want_sources) {
      errors.push_back(name + " has " + std::to_string(e.sources.size()) + " sources, expected " +
                       std::to_string(want_sources));
    }
    if (e.targets.size() != want_targets) {
      errors.push_back(name + " has " + std::to_string(e.targets.size()) + " targets, expected " +
                       std::to_string(want_targets));
    }
    for (VertexId v : e.sources) {
      if (!known.count(v)) errors.push_back(name + " uses unknown vertex " + std::to_string(v));
      ++as_source[v];
    }
    for (VertexId v : e.targets) {
      if (!known.count(v)) errors.push_back(name + " uses unknown vertex " + std::to_string(v));
      ++as_target[v];
    }
  }
  for (VertexId v : known) {
    const std::size_t t = as_target.count(v) ? as_target[v] : 0;
    const std::size_t src = as_source.count(v) ? as_source[v] : 0;
    if (t != 1) {
      errors.push_back("vertex " + std::to_string(v) + " is the target of " + std::to_string(t) +
                       " hyperedges, expected exactly 1");
    }
    if (src > 1) {
      errors.push_back("vertex " + std::to_string(v) + " is a source of " + std::to_string(src) +
                       " hyperedges, expected at most 1");
    }
  }
  if (!errors.empty()) return errors;
  auto kind_above = [&](VertexId v) { return s.edges[*s.target_of(v)].kind; };
  for (std::size_t i : s.edges_of(EdgeKind::cut)) {
    const auto& e = s.edges[i];
    const EdgeKind a = kind_above(e.sources[0]);
    const EdgeKind b = kind_above(e.sources[1]);
    const bool atoms = a == EdgeKind::ax && b == EdgeKind::ax;
    const bool dual = (a == EdgeKind::tensor && b == EdgeKind::par) || (a == EdgeKind::par && b == EdgeKind::tensor);
    if (!atoms && !dual) {
      errors.push_back("cut hyperedge " + std::to_string(i) + " joins a " + to_string(a) + " conclusion and a " +
                       to_string(b) + " conclusion; expected two atoms or a tensor and a par");
    }
  }
  return errors;
}

ProofStructure parse_proof_structure(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = position_of(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed proof-structure JSON", line, column);
  }
  ProofStructure s;
  try {
    for (const auto& v : j.at("vertices")) s.vertices.push_back(v.get<VertexId>());
    for (const auto& e : j.at("edges")) {
      const std::string kind = e.at("kind").get<std::string>();
      const auto k = parse_edge_kind(kind);
      if (!k) throw std::invalid_argument("unknown hyperedge kind '" + kind + "'");
      Hyperedge h;
      h.kind = *k;
      if (e.contains("sources")) h.sources = e["sources"].get<std::vector<VertexId>>();
      if (e.contains("targets")) h.targets = e["targets"].get<std::vector<VertexId>>();
      s.edges.push_back(std::move(h));
    }
    if (j.contains("labels")) {
      for (const auto& [key, value] : j["labels"].items()) {
        if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
          throw std::invalid_argument("label key '" + key + "' is not a vertex id");
        }
        s.labels[static_cast<VertexId>(std::stoul(key))] = parse_formula(value.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("proof-structure record: ") + e.what());
  }
  return s;
}

std::string to_json(const ProofStructure& s) {
  nlohmann::json j;
  j["vertices"] = s.vertices;
  j["edges"] = nlohmann::json::array();
  for (const auto& e : s.edges) {
    j["edges"].push_back({{"kind", to_string(e.kind)}, {"sources", e.sources}, {"targets", e.targets}});
  }
  if (!s.labels.empty()) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [v, f] : s.labels) labels[std::to_string(v)] = f.to_string();
    j["labels"] = labels;
  }
  return j.dump(2);
}

std::map<VertexId, Formula> synthesize_labels(const ProofStructure& s) {
  std::map<VertexId, Formula> labels;
  std::size_t k = 0;
  for (const auto& e : s.edges) {
    if (e.kind != EdgeKind::ax || e.targets.size() != 2) continue;
    const std::string name = "X" + std::to_string(++k);
    labels[e.targets[0]] = Formula::variable(name);
    labels[e.targets[1]] = Formula::variable(name, true);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : s.edges) {
      if ((e.kind != EdgeKind::tensor && e.kind != EdgeKind::par) || e.sources.size() != 2 || e.targets.size() != 1) {
        continue;
      }
      if (labels.count(e.targets[0]) || !labels.count(e.sources[0]) || !labels.count(e.sources[1])) continue;
      const Formula& a = labels[e.sources[0]];
      const Formula& b = labels[e.sources[1]];
      labels[e.targets[0]] = e.kind == EdgeKind::tensor ? Formula::tensor(a, b) : Formula::par(a, b);
      changed = true;
    }
  }
  return labels;
}

std::vector<std::string> check_labels(const ProofStructure& s, const std::map<VertexId, Formula>& labels) {
  std::vector<std::string> errors;
  auto get = [&](VertexId v) -> const Formula* {
    const auto it = labels.find(v);
    return it == labels.end() ? nullptr : &it->second;
  };
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    const auto& e = s.edges[i];
    const std::string name = "hyperedge " + std::to_string(i) + " (" + to_string(e.kind) + ")";
    if (e.kind == EdgeKind::ax && e.targets.size() == 2) {
      const Formula* a = get(e.targets[0]);
      const Formula* b = get(e.targets[1]);
      if (a && !a->is_atom()) errors.push_back(name + ": vertex " + std::to_string(e.targets[0]) + " is not atomic");
      if (b && !b->is_atom()) errors.push_back(name + ": vertex " + std::to_string(e.targets[1]) + " is not atomic");
      if (a && b && !(*a == b->dual())) errors.push_back(name + ": conclusions are not dual");
    } else if (e.kind == EdgeKind::cut && e.sources.size() == 2) {
      const Formula* a = get(e.sources[0]);
      const Formula* b = get(e.sources[1]);
      if (a && b && !(*a == b->dual())) errors.push_back(name + ": premises are not dual");
    } else if ((e.kind == EdgeKind::tensor || e.kind == EdgeKind::par) && e.sources.size() == 2 &&
               e.targets.size() == 1) {
      const Formula* a = get(e.sources[0]);
      const Formula* b = get(e.sources[1]);
      const Formula* c = get(e.targets[0]);
      if (a && b && c) {
        const Formula want = e.kind == EdgeKind::tensor ? Formula::tensor(*a, *b) : Formula::par(*a, *b);
        if (!(*c == want)) errors.push_back(name + ": conclusion label is not " + want.to_string());
      }
    }
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Addresses and translation

std::string vertex_symbol(VertexId v) { return "p" + std::to_string(v); }

Address address(const ProofStructure& s, VertexId v) {
  const auto above = s.target_of(v);
  if (!above || s.edges[*above].kind != EdgeKind::ax) {
    throw std::invalid_argument("vertex " + std::to_string(v) + " is not an atom");
  }
  std::string reversed;  // steps from the atom downwards
  VertexId current = v;
  std::set<VertexId> seen{v};
  while (true) {
    const auto below = s.source_of(current);
    if (!below || s.edges[*below].kind == EdgeKind::cut) break;
    const auto& e = s.edges[*below];
    reversed += e.sources[0] == current ? 'l' : 'r';
    if (e.targets.empty()) break;
    current = e.targets[0];
    if (!seen.insert(current).second) throw std::invalid_argument("cyclic path below atom " + std::to_string(v));
  }
  return {current, std::string(reversed.rbegin(), reversed.rend())};
}

Term locus(std::string_view symbol, std::string_view path, const Term& tail) {
  Term t = tail;
  for (auto it = path.rbegin(); it != path.rend(); ++it) t = cons(Term::constant(*it == 'l' ? "l" : "r"), t);
  return Term::application(symbol, {t});
}

Term address_ray(const ProofStructure& s, VertexId v) {
  const Address a = address(s, v);
  return locus(vertex_symbol(a.conclusion), a.path, var_x());
}

Constellation vehicle(const ProofStructure& s) {
  Constellation out;
  for (const auto& e : s.edges) {
    if (e.kind != EdgeKind::ax) continue;
    out.stars.push_back(Star{address_ray(s, e.targets[0]), address_ray(s, e.targets[1])});
  }
  return out;
}

Constellation cuts(const ProofStructure& s) {
  Constellation out;
  for (const auto& e : s.edges) {
    if (e.kind != EdgeKind::cut) continue;
    out.stars.push_back(Star{Term::application(vertex_symbol(e.sources[0]), {var_x()}),
                             Term::application(vertex_symbol(e.sources[1]), {var_x()})});
  }
  return out;
}

Constellation comp(const ProofStructure& s) {
  return disjoint_union(colour_wrap(vehicle(s), "c", Polarity::plus), colour_wrap(cuts(s), "c", Polarity::minus));
}

ExecutionResult normalise_via_execution(const ProofStructure& s, EngineOptions options) {
  options.colours = ColourSet::of({"c"});
  return execute(comp(s), options);
}

// ---------------------------------------------------------------------------
// Cut-elimination

std::optional<ProofStructure> reduce(const ProofStructure& s) {
  auto remove = [](ProofStructure& r, std::vector<std::size_t> edge_indices, std::vector<VertexId> vs) {
    std::sort(edge_indices.rbegin(), edge_indices.rend());
    for (std::size_t i : edge_indices) r.edges.erase(r.edges.begin() + static_cast<std::ptrdiff_t>(i));
    for (VertexId v : vs) {
      r.vertices.erase(std::remove(r.vertices.begin(), r.vertices.end(), v), r.vertices.end());
      r.labels.erase(v);
    }
  };
  for (std::size_t ci : s.edges_of(EdgeKind::cut)) {
    const auto& cut = s.edges[ci];
    if (cut.sources.size() != 2) continue;
    // ax/cut: ax(v0, v1), cut(v1, v2) with v2 below e  ~>  e with v2 := v0.
    for (int side = 0; side < 2; ++side) {
      const VertexId v1 = cut.sources[side];
      const VertexId v2 = cut.sources[1 - side];
      const auto ax = s.target_of(v1);
      if (!ax || s.edges[*ax].kind != EdgeKind::ax) continue;
      const auto& targets = s.edges[*ax].targets;
      const VertexId v0 = targets[0] == v1 ? targets[1] : targets[0];
      if (v0 == v2) continue;  // a cut closing its own axiom is irreducible
      const auto above = s.target_of(v2);
      if (!above) continue;
      ProofStructure r = s;
      for (auto& t : r.edges[*above].targets) {
        if (t == v2) t = v0;
      }
      remove(r, {*ax, ci}, {v1, v2});
      return r;
    }
    // tensor/par: cut(A⊗B, A⊥⅋B⊥) ~> cut(A, A⊥), cut(B, B⊥).
    const auto ea = s.target_of(cut.sources[0]);
    const auto eb = s.target_of(cut.sources[1]);
    if (!ea || !eb) continue;
    const EdgeKind ka = s.edges[*ea].kind;
    const EdgeKind kb = s.edges[*eb].kind;
    const bool rewire = (ka == EdgeKind::tensor && kb == EdgeKind::par) || (ka == EdgeKind::par && kb == EdgeKind::tensor);
    if (!rewire) continue;
    const auto& a = s.edges[*ea].sources;
    const auto& b = s.edges[*eb].sources;
    ProofStructure r = s;
    r.edges.push_back({EdgeKind::cut, {a[0], b[0]}, {}});
    r.edges.push_back({EdgeKind::cut, {a[1], b[1]}, {}});
    remove(r, {*ea, *eb, ci}, {cut.sources[0], cut.sources[1]});
    return r;
  }
  return std::nullopt;
}

ProofStructure normal_form(const ProofStructure& s) {
  ProofStructure current = s;
  while (auto next = reduce(current)) current = std::move(*next);
  return current;
}

// ---------------------------------------------------------------------------
// Switchings and tests

std::string Switching::to_string() const {
  std::string out;
  for (const auto& [edge, side] : choice) {
    if (!out.empty()) out += ' ';
    out += "par" + std::to_string(edge) + (side == Side::left ? ":L" : ":R");
  }
  return out.empty() ? "-" : out;
}

std::vector<Switching> switchings(const ProofStructure& s) {
  const auto pars = s.edges_of(EdgeKind::par);
  if (pars.size() >= 63) throw std::invalid_argument("too many par hyperedges to enumerate switchings");
  std::vector<Switching> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pars.size()); ++mask) {
    Switching phi;
    for (std::size_t i = 0; i < pars.size(); ++i) phi.choice[pars[i]] = (mask >> i) & 1 ? Side::right : Side::left;
    out.push_back(std::move(phi));
  }
  return out;
}

CorrectnessGraph correctness_graph(const ProofStructure& s, const Switching& phi) {
  CorrectnessGraph g;
  g.vertex_nodes = s.vertices.size();
  g.node_count = s.vertices.size() + s.edges.size();
  std::map<VertexId, std::size_t> node;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) node[s.vertices[i]] = i;
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    const auto& e = s.edges[i];
    const std::size_t h = g.vertex_nodes + i;
    for (VertexId v : e.targets) g.edges.emplace_back(node.at(v), h);
    for (std::size_t k = 0; k < e.sources.size(); ++k) {
      if (e.kind == EdgeKind::par) {
        const auto it = phi.choice.find(i);
        const Side side = it == phi.choice.end() ? Side::left : it->second;
        if ((side == Side::left) != (k == 0)) continue;
      }
      g.edges.emplace_back(node.at(e.sources[k]), h);
    }
  }
  return g;
}

std::optional<std::vector<std::size_t>> CorrectnessGraph::find_cycle() const {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(node_count);  // (neighbour, edge id)
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].first].emplace_back(edges[i].second, i);
    adj[edges[i].second].emplace_back(edges[i].first, i);
  }
  std::vector<int> state(node_count, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::size_t> parent(node_count, SIZE_MAX);
  std::vector<std::size_t> parent_edge(node_count, SIZE_MAX);
  for (std::size_t root = 0; root < node_count; ++root) {
    if (state[root]) continue;
    // Iterative DFS keeping the next adjacency index per node.
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next == adj[u].size()) {
        state[u] = 2;
        stack.pop_back();
        continue;
      }
      const auto [w, eid] = adj[u][next++];
      if (eid == parent_edge[u]) continue;
      if (state[w] == 1) {
        std::vector<std::size_t> cycle;
        for (std::size_t x = u; x != w; x = parent[x]) cycle.push_back(x);
        cycle.push_back(w);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (state[w] == 0) {
        state[w] = 1;
        parent[w] = u;
        parent_edge[w] = eid;
        stack.emplace_back(w, 0);
      }
    }
  }
  return std::nullopt;
}

bool CorrectnessGraph::acyclic() const { return !find_cycle().has_value(); }

bool CorrectnessGraph::connected() const {
  if (node_count == 0) return true;
  std::vector<std::size_t> parent(node_count);
  for (std::size_t i = 0; i < node_count; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::size_t components = node_count;
  for (const auto& [a, b] : edges) {
    const std::size_t ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

Constellation test_of(const ProofStructure& s, const Switching& phi) {
  Constellation out;
  auto q = [](VertexId v) { return Term::application(vertex_symbol(v), {guarded(var_x())}); };
  auto p = [](VertexId v) { return Term::application(vertex_symbol(v), {var_x()}); };
  const auto concl = s.conclusions();
  for (VertexId v : s.vertices) {
    const auto above = s.target_of(v);
    if (above) {
      const auto& e = s.edges[*above];
      switch (e.kind) {
        case EdgeKind::ax:
          out.stars.push_back(Star{minus_t(address_ray(s, v)), plus_c(q(v))});
          break;
        case EdgeKind::tensor:
          out.stars.push_back(Star{minus_c(q(e.sources[0])), minus_c(q(e.sources[1])), plus_c(q(v))});
          break;
        case EdgeKind::par: {
          const auto it = phi.choice.find(*above);
          const bool left = it == phi.choice.end() || it->second == Side::left;
          const VertexId kept = e.sources[left ? 0 : 1];
          const VertexId dropped = e.sources[left ? 1 : 0];
          out.stars.push_back(Star{minus_c(q(kept)), plus_c(q(v))});
          out.stars.push_back(Star{minus_c(q(dropped))});
          break;
        }
        case EdgeKind::cut:
          break;
      }
    }
    if (std::binary_search(concl.begin(), concl.end(), v)) out.stars.push_back(Star{minus_c(q(v)), p(v)});
  }
  for (const auto& e : s.edges) {
    if (e.kind == EdgeKind::cut) out.stars.push_back(Star{minus_c(p(e.sources[0])), minus_c(p(e.sources[1]))});
  }
  return out;
}

Constellation tested_vehicle(const ProofStructure& s) { return colour_wrap(vehicle(s), "t", Polarity::plus); }

std::string to_string(Status status) {
  switch (status) {
    case Status::mll_correct:
      return "MLL-correct";
    case Status::mix_only:
      return "MIX-only";
    case Status::incorrect:
      return "incorrect";
    case Status::unknown:
      return "unknown";
  }
  return "unknown";
}

Verdict check(const ProofStructure& s, EngineOptions options) {
  const auto errors = validate(s);
  if (!errors.empty()) throw std::invalid_argument("invalid proof-structure: " + errors.front());
  Verdict verdict;
  for (VertexId v : s.conclusions()) verdict.conclusions.rays.push_back(Term::application(vertex_symbol(v), {var_x()}));
  options.colours = ColourSet::of({"c", "t"});
  const Constellation vehicle_t = tested_vehicle(s);
  bool cyclic = false;
  std::vector<Constellation> unions;
  for (const auto& phi : switchings(s)) {
    SwitchingEvidence ev;
    ev.switching = phi;
    Constellation u = disjoint_union(vehicle_t, test_of(s, phi));
    ev.acyclic = DependencyGraph(u, options.colours).acyclic();
    if (!ev.acyclic) {
      cyclic = true;
      const CorrectnessGraph g = correctness_graph(s, phi);
      if (const auto c = g.find_cycle()) {
        for (std::size_t n : *c) {
          if (n < g.vertex_nodes) ev.cycle.push_back(s.vertices[n]);
        }
      }
    }
    verdict.evidence.push_back(std::move(ev));
    unions.push_back(std::move(u));
  }
  if (cyclic) {
    verdict.status = Status::incorrect;
    return verdict;
  }
  bool all_conclusions = true;
  bool definitely_not = false;
  for (std::size_t i = 0; i < unions.size(); ++i) {
    auto& ev = verdict.evidence[i];
    ExecutionResult r = execute(unions[i], options);
    const bool single = r.stars.size() == 1 && stars_match(r.stars[0], verdict.conclusions);
    ev.conclusions_star = r.complete && single;
    if (!ev.conclusions_star) all_conclusions = false;
    if (!single) definitely_not = true;
    ev.execution = std::move(r);
  }
  if (all_conclusions) {
    verdict.status = Status::mll_correct;
  } else if (definitely_not) {
    verdict.status = Status::mix_only;
  } else {
    verdict.status = Status::unknown;
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Orthogonality and typing

std::optional<Relation> parse_relation(std::string_view text) {
  if (text == "fin") return Relation::fin;
  if (text == "one" || text == "1") return Relation::one;
  if (text == "R") return Relation::R;
  return std::nullopt;
}

std::string to_string(Relation rel) {
  switch (rel) {
    case Relation::fin:
      return "fin";
    case Relation::one:
      return "one";
    case Relation::R:
      return "R";
  }
  return "?";
}

std::string to_string(Answer answer) {
  switch (answer) {
    case Answer::yes:
      return "true";
    case Answer::no:
      return "false";
    case Answer::unknown:
      return "unknown";
  }
  return "unknown";
}

Orthogonality orthogonal(const Constellation& phi1, const Constellation& phi2, Relation rel, EngineOptions options) {
  Orthogonality out;
  const Constellation u = disjoint_union(phi1, phi2);
  options.keep_diagrams = true;
  out.execution = execute(u, options);
  const auto& ex = out.execution;
  // A cycle in a correct saturated diagram can be unrolled any number of
  // times (identical copies share one unifier), so Ex is infinite.
  for (const auto& d : ex.diagrams) {
    if (d.links.size() >= d.size()) {
      out.infinite_witness = true;
      break;
    }
  }
  if (out.infinite_witness) {
    out.answer = Answer::no;
    out.reason = "a saturated correct diagram contains a cycle: infinitely many diagrams";
    return out;
  }
  Star roots;
  for (const auto& star : u.stars) {
    for (const auto& r : star.rays) {
      if (!r.is_coloured()) roots.rays.push_back(r);
    }
  }
  const std::size_t n = ex.stars.size();
  switch (rel) {
    case Relation::fin:
      if (ex.complete) {
        out.answer = Answer::yes;
        out.reason = "execution is complete with " + std::to_string(n) + " stars";
      } else if (DependencyGraph(u, options.colours).acyclic()) {
        out.answer = Answer::yes;
        out.reason = "acyclic dependency graph";
      } else {
        out.answer = Answer::unknown;
        out.reason = "cyclic dependency graph, search incomplete (" + ex.incomplete_reason + ")";
      }
      break;
    case Relation::one:
      if (n >= 2) {
        out.answer = Answer::no;
        out.reason = std::to_string(n) + " stars";
      } else if (ex.complete) {
        out.answer = n == 1 ? Answer::yes : Answer::no;
        out.reason = std::to_string(n) + " stars";
      } else {
        out.answer = Answer::unknown;
        out.reason = "search incomplete (" + ex.incomplete_reason + ")";
      }
      break;
    case Relation::R: {
      const bool matches = n == 1 && stars_match(ex.stars[0], roots);
      if (n >= 2 || (n == 1 && !matches)) {
        out.answer = Answer::no;
        out.reason = n >= 2 ? std::to_string(n) + " stars" : "the star differs from the uncoloured rays";
      } else if (ex.complete) {
        out.answer = matches ? Answer::yes : Answer::no;
        out.reason = matches ? "the star of the uncoloured rays" : "no star";
      } else {
        out.answer = Answer::unknown;
        out.reason = "search incomplete (" + ex.incomplete_reason + ")";
      }
      break;
    }
  }
  return out;
}

std::vector<SyntaxNode> syntax_forest(const Sequent& gamma) {
  std::vector<SyntaxNode> nodes;
  std::function<int(const Formula&, const std::string&, const std::string&)> build =
      [&](const Formula& f, const std::string& conclusion, const std::string& path) -> int {
    const int index = static_cast<int>(nodes.size());
    nodes.push_back({path.empty() ? conclusion : conclusion + "_" + path, conclusion, path, f, -1, -1});
    if (!f.is_atom()) {
      const int l = build(f.sub[0], conclusion, path + "l");
      const int r = build(f.sub[1], conclusion, path + "r");
      nodes[index].left = l;
      nodes[index].right = r;
    }
    return index;
  };
  for (const auto& [name, f] : gamma) build(f, name, "");
  return nodes;
}

std::vector<Constellation> sequent_tests(const Sequent& gamma) {
  const auto nodes = syntax_forest(gamma);
  std::vector<std::size_t> pars;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].formula.kind == Formula::Kind::par) pars.push_back(i);
  }
  if (pars.size() >= 63) throw std::invalid_argument("too many pars to enumerate switchings");
  auto q = [&](int i) { return Term::application(nodes[static_cast<std::size_t>(i)].symbol, {guarded(var_x())}); };
  std::vector<Constellation> tests;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pars.size()); ++mask) {
    Constellation t;
    std::size_t par_rank = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      const int self = static_cast<int>(i);
      if (n.formula.kind == Formula::Kind::tensor) {
        t.stars.push_back(Star{minus_c(q(n.left)), minus_c(q(n.right)), plus_c(q(self))});
      } else if (n.formula.kind == Formula::Kind::par) {
        const bool left = ((mask >> par_rank++) & 1) == 0;
        t.stars.push_back(Star{minus_c(q(left ? n.left : n.right)), plus_c(q(self))});
        t.stars.push_back(Star{minus_c(q(left ? n.right : n.left))});
      }
      if (n.path.empty()) t.stars.push_back(Star{minus_c(q(self)), Term::application(n.symbol, {var_x()})});
    }
    tests.push_back(std::move(t));
  }
  return tests;
}

Star adapter(const Term& from, const Term& to) { return Star{opposite(from), opposite(to)}; }

std::vector<Term> sequent_addresses(const Sequent& gamma) {
  std::vector<Term> out;
  for (const auto& n : syntax_forest(gamma)) {
    if (n.formula.is_atom()) out.push_back(locus(n.conclusion, n.path, var_x()));
  }
  return out;
}

Constellation sequent_adapters(const Sequent& gamma) {
  Constellation out;
  for (const auto& n : syntax_forest(gamma)) {
    if (!n.formula.is_atom()) continue;
    const Term vehicle_side = coloured("t", Polarity::plus, locus(n.conclusion, n.path, var_x()));
    const Term test_side = minus_c(Term::application(n.symbol, {guarded(var_x())}));
    out.stars.push_back(adapter(vehicle_side, test_side));
  }
  return out;
}

bool proof_like(const Constellation& phi, const Sequent& gamma) {
  std::vector<Term> wanted = sequent_addresses(gamma);
  std::vector<bool> used(wanted.size(), false);
  for (const auto& star : phi.stars) {
    if (star.size() != 2) return false;
    for (const auto& ray : star.rays) {
      const Term r = strip_colours(ray);
      bool found = false;
      for (std::size_t i = 0; i < wanted.size() && !found; ++i) {
        if (!used[i] && alpha_equivalent(r, wanted[i])) used[i] = found = true;
      }
      if (!found) return false;
    }
  }
  return std::all_of(used.begin(), used.end(), [](bool b) { return b; });
}

TypeCheck type_check(const Constellation& phi, const Sequent& gamma, Relation rel, EngineOptions options) {
  TypeCheck out;
  out.proof_like = proof_like(phi, gamma);
  Constellation wrapped;
  for (const auto& star : phi.stars) {
    Star s;
    for (const auto& r : star.rays) s.rays.push_back(r.is_coloured() ? r : coloured("t", Polarity::plus, r));
    wrapped.stars.push_back(std::move(s));
  }
  const Constellation adapters = sequent_adapters(gamma);
  bool all_yes = true;
  bool any_no = false;
  for (const auto& test : sequent_tests(gamma)) {
    out.tests.push_back(orthogonal(wrapped, disjoint_union(test, adapters), rel, options));
    all_yes = all_yes && out.tests.back().answer == Answer::yes;
    any_no = any_no || out.tests.back().answer == Answer::no;
  }
  out.answer = any_no ? Answer::no : all_yes ? Answer::yes : Answer::unknown;
  return out;
}

}  // namespace stellar::mll
