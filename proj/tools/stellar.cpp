// Command-line front end: execution, dependency graphs, the encodings and the
// MLL back end.  Exit codes: 0 success / correct, 1 incorrect / reject,
// 2 unknown / incomplete, 64 usage or input error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stellar/constellation.hpp"
#include "stellar/encodings.hpp"
#include "stellar/engine.hpp"
#include "stellar/mll.hpp"
#include "stellar/syntax.hpp"

namespace {

using json = nlohmann::json;
using namespace stellar;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUnknown = 2;
constexpr int kUsage = 64;
constexpr int kFormatVersion = 1;

/// Set by the subcommand that ran.
int exit_code = kOk;

/// Input problems are reported like usage errors.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct EngineFlags {
  std::vector<std::string> colours;
  std::size_t max_vertices = 64;
  std::size_t budget = 250'000;
  unsigned jobs = 1;

  void attach(CLI::App* app) {
    app->add_option("--colors", colours, "active colour base names (both polarities)")->delimiter(',');
    app->add_option("--max-vertices", max_vertices, "largest diagram explored")->check(CLI::PositiveNumber);
    app->add_option("--budget", budget, "partial diagrams expanded before giving up")->check(CLI::PositiveNumber);
    app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  EngineOptions options() const {
    EngineOptions o;
    if (!colours.empty()) o.colours = ColourSet::of(colours);
    o.max_vertices = max_vertices;
    o.max_expansions = budget;
    o.jobs = jobs;
    return o;
  }
};

/// Distinct stars with multiplicities, in the (canonical) output order.
std::vector<std::pair<std::string, std::size_t>> grouped(const Constellation& stars) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& s : stars.stars) {
    const std::string text = s.to_string();
    if (!out.empty() && out.back().first == text) {
      ++out.back().second;
    } else {
      out.emplace_back(text, 1);
    }
  }
  return out;
}

void print_stars(std::ostream& os, const Constellation& stars) {
  for (const auto& [text, count] : grouped(stars)) os << text << "  \xC3\x97" << count << '\n';
}

json execution_json(const ExecutionResult& r) {
  json stars = json::array();
  for (const auto& s : r.stars.stars) stars.push_back(s.to_string());
  json j = {{"stars", stars},
            {"complete", r.complete},
            {"diagrams_explored", r.diagrams_explored},
            {"diagrams_pruned", r.diagrams_pruned},
            {"max_vertices", r.max_vertices}};
  if (!r.complete) j["incomplete_reason"] = r.incomplete_reason;
  return j;
}

void print_completion(std::ostream& os, const ExecutionResult& r) {
  os << "complete: " << (r.complete ? "true" : "false");
  if (!r.complete) os << " (" << r.incomplete_reason << ")";
  os << '\n';
}

// ---------------------------------------------------------------------------

struct ExecCommand {
  std::string file;
  std::string format = "text";
  bool conceal = false;
  bool drop_empty = false;
  bool show_diagrams = false;
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("exec", "execute a constellation");
    app->add_option("FILE", file, "constellation file")->required();
    app->add_option("--format", format, "text | json | dot")->check(CLI::IsMember({"text", "json", "dot"}));
    app->add_flag("--conceal", conceal, "keep only stars without coloured rays");
    app->add_flag("--filter-noise", drop_empty, "drop empty stars");
    app->add_flag("--show-diagrams", show_diagrams, "print the saturated diagrams as DOT");
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }

  int run() const {
    const Constellation phi = parse_constellation(read_file(file));
    EngineOptions o = engine.options();
    o.conceal = conceal;
    o.drop_empty = drop_empty;
    o.keep_diagrams = show_diagrams || format == "dot";
    ExecutionResult r = execute(phi, o);
    Constellation shown = r.stars;
    if (conceal) shown = stellar::conceal(shown);
    if (drop_empty) shown = filter_noise(shown);
    if (format == "json") {
      ExecutionResult copy = r;
      copy.stars = shown;
      json j = execution_json(copy);
      j["format_version"] = kFormatVersion;
      std::cout << j.dump(2) << '\n';
    } else if (format == "dot") {
      for (const auto& d : r.diagrams) std::cout << d.to_dot(phi);
    } else {
      print_stars(std::cout, shown);
      print_completion(std::cout, r);
      if (show_diagrams) {
        for (const auto& d : r.diagrams) std::cout << d.to_dot(phi);
      }
    }
    return r.complete ? kOk : kUnknown;
  }
};

struct DgraphCommand {
  std::string file;
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("dgraph", "print the dependency graph as DOT");
    app->add_option("FILE", file, "constellation file")->required();
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }
  int run() const {
    const Constellation phi = parse_constellation(read_file(file));
    std::cout << DependencyGraph(phi, engine.options().colours).to_dot(phi);
    return kOk;
  }
};

struct PropsCommand {
  std::string file;
  std::string format = "text";
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("props", "structural properties of a constellation");
    app->add_option("FILE", file, "constellation file")->required();
    app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }
  int run() const {
    const Constellation phi = parse_constellation(read_file(file));
    const PropertyReport p = analyze(phi, engine.options().colours);
    if (format == "json") {
      json j = {{"format_version", kFormatVersion}, {"exact", p.exact},       {"acyclic", p.acyclic},
                {"connected", p.connected},         {"monovalent", p.monovalent}, {"colours", p.colours}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << "stars: " << phi.size() << '\n'
                << "colours: " << p.colours << '\n'
                << "exact: " << std::boolalpha << p.exact << '\n'
                << "acyclic: " << p.acyclic << '\n'
                << "connected: " << p.connected << '\n'
                << "monovalent: " << p.monovalent << '\n';
    }
    return kOk;
  }
};

struct LpCommand {
  std::string file;
  std::string query;
  std::string format = "text";
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* lp = root.add_subcommand("lp", "logic programs");
    lp->require_subcommand(1);
    auto* app = lp->add_subcommand("run", "answer a query against a program");
    app->add_option("FILE", file, "program file")->required();
    app->add_option("--query", query, "query atom (defaults to the file's `query` line)");
    app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }
  int run() const {
    LogicProgramSource src = parse_logic_program(read_file(file));
    for (const auto& w : src.warnings) std::cerr << "warning: " << w << '\n';
    std::optional<Term> q = src.query;
    if (!query.empty()) q = parse_term(query);
    if (!q) throw InputError("no query given");
    const ExecutionResult r = run_logic_program(src.program, *q, engine.options());
    if (format == "json") {
      json j = execution_json(r);
      j["format_version"] = kFormatVersion;
      j["query"] = q->to_string();
      std::cout << j.dump(2) << '\n';
    } else {
      print_stars(std::cout, r.stars);
      print_completion(std::cout, r);
    }
    return r.complete ? kOk : kUnknown;
  }
};

struct TmCommand {
  std::string file;
  std::string word;
  std::string format = "text";
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* tm = root.add_subcommand("tm", "non-deterministic Turing machines");
    tm->require_subcommand(1);
    auto* app = tm->add_subcommand("run", "decide a word");
    app->add_option("FILE", file, "machine file")->required();
    app->add_option("WORD", word, "input word (omit for the empty word)");
    app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }
  int run() const {
    const TuringMachine m = parse_turing_machine(read_file(file));
    m.validate();
    const TmRun r = run_ntm(m, word, engine.options());
    std::string verdict = to_string(r.verdict);
    for (auto& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (format == "json") {
      json j = execution_json(r.execution);
      j["format_version"] = kFormatVersion;
      j["verdict"] = verdict;
      j["word"] = word;
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << verdict << '\n';
      print_completion(std::cout, r.execution);
    }
    switch (r.verdict) {
      case TmVerdict::accept:
        return kOk;
      case TmVerdict::reject:
        return kNegative;
      case TmVerdict::unknown:
        return kUnknown;
    }
    return kUnknown;
  }
};

struct AtamCommand {
  std::string file;
  std::size_t max_tiles = 4;
  std::string format = "text";
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* atam = root.add_subcommand("atam", "abstract tile assembly");
    atam->require_subcommand(1);
    auto* app = atam->add_subcommand("run", "enumerate assemblies");
    app->add_option("FILE", file, "tile system file")->required();
    app->add_option("--max-tiles", max_tiles, "largest assembly")->check(CLI::PositiveNumber);
    app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }
  int run() const {
    const TileSystem system = parse_tile_system(read_file(file));
    const AssemblyResult r = enumerate_assemblies(system, max_tiles, engine.options());
    if (format == "json") {
      json list = json::array();
      for (const auto& a : r.assemblies) {
        json tiles = json::array();
        for (const auto& p : a.placement) tiles.push_back({{"tile", system.tiles[p.tile].name}, {"x", p.x}, {"y", p.y}});
        list.push_back({{"tiles", tiles},
                        {"anchored", a.anchored},
                        {"stable", a.anchored && is_tau_stable(system, a.placement)}});
      }
      json j = {{"format_version", kFormatVersion}, {"assemblies", list},          {"complete", r.complete},
                {"diagrams_explored", r.diagrams_explored}, {"temperature", system.temperature}};
      if (!r.complete) j["incomplete_reason"] = r.incomplete_reason;
      std::cout << j.dump(2) << '\n';
    } else {
      // Distinct placements with the number of diagrams realising them.
      std::vector<std::pair<const Assembly*, std::size_t>> distinct;
      std::size_t unanchored = 0;
      for (const auto& a : r.assemblies) {
        if (!a.anchored) {
          ++unanchored;
          continue;
        }
        auto it = std::find_if(distinct.begin(), distinct.end(),
                               [&](const auto& d) { return d.first->placement == a.placement; });
        if (it == distinct.end()) {
          distinct.emplace_back(&a, 1);
        } else {
          ++it->second;
        }
      }
      std::cout << "temperature: " << system.temperature << '\n'
                << "assemblies: " << r.assemblies.size() << "\ndistinct placements: " << distinct.size() << '\n';
      for (std::size_t i = 0; i < distinct.size(); ++i) {
        const auto& [a, count] = distinct[i];
        std::cout << "\n#" << i + 1 << "  tiles: " << a->placement.size() << "  stable: " << std::boolalpha
                  << is_tau_stable(system, a->placement) << "  \xC3\x97" << count << '\n'
                  << render_placement(system, a->placement);
      }
      if (unanchored) std::cout << "\nunanchored: " << unanchored << '\n';
      std::cout << "complete: " << (r.complete ? "true" : "false");
      if (!r.complete) std::cout << " (" << r.incomplete_reason << ")";
      std::cout << '\n';
    }
    return r.complete ? kOk : kUnknown;
  }
};

mll::ProofStructure load_structure(const std::string& file) { return mll::parse_proof_structure(read_file(file)); }

/// Prints the validation errors; true when the structure is valid.
bool report_validation(const mll::ProofStructure& s) {
  const auto errors = mll::validate(s);
  for (const auto& e : errors) std::cerr << "invalid proof-structure: " << e << '\n';
  return errors.empty();
}

struct MllCommand {
  std::string check_file, translate_file, normalise_file;
  std::string format = "text";
  EngineFlags engine;
  CLI::App* check_app = nullptr;
  CLI::App* translate_app = nullptr;
  CLI::App* normalise_app = nullptr;

  void attach(CLI::App& root) {
    auto* mll = root.add_subcommand("mll", "MLL proof-structures");
    mll->require_subcommand(1);
    check_app = mll->add_subcommand("check", "stellar correctness criterion");
    check_app->add_option("FILE", check_file, "proof-structure JSON")->required();
    check_app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(check_app);
    check_app->callback([this] { exit_code = check(); });
    translate_app = mll->add_subcommand("translate", "vehicle, cuts and tests as constellations");
    translate_app->add_option("FILE", translate_file, "proof-structure JSON")->required();
    translate_app->callback([this] { exit_code = translate(); });
    normalise_app = mll->add_subcommand("normalise", "cut-elimination by rewriting and by execution");
    normalise_app->add_option("FILE", normalise_file, "proof-structure JSON")->required();
    normalise_app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(normalise_app);
    normalise_app->callback([this] { exit_code = normalise(); });
  }

  int check() const {
    const auto s = load_structure(check_file);
    if (!report_validation(s)) return kNegative;
    const mll::Verdict v = mll::check(s, engine.options());
    if (format == "json") {
      json ev = json::array();
      for (const auto& e : v.evidence) {
        json item = {{"switching", e.switching.to_string()}, {"acyclic", e.acyclic}};
        if (!e.cycle.empty()) item["cycle"] = e.cycle;
        if (e.execution) item["execution"] = execution_json(*e.execution);
        item["conclusions_star"] = e.conclusions_star;
        ev.push_back(item);
      }
      json j = {{"format_version", kFormatVersion},
                {"status", mll::to_string(v.status)},
                {"conclusions", v.conclusions.to_string()},
                {"switchings", ev}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << mll::to_string(v.status) << '\n';
      for (const auto& e : v.evidence) {
        std::cout << "  switching " << e.switching.to_string() << ": ";
        if (!e.acyclic) {
          std::cout << "cyclic";
          if (!e.cycle.empty()) {
            std::cout << " through vertices";
            for (auto c : e.cycle) std::cout << ' ' << c;
          }
        } else if (e.execution) {
          std::cout << e.execution->stars.to_string();
          if (!e.execution->complete) std::cout << " (incomplete)";
        } else {
          std::cout << "acyclic";
        }
        std::cout << '\n';
      }
    }
    switch (v.status) {
      case mll::Status::mll_correct:
        return kOk;
      case mll::Status::mix_only:
      case mll::Status::incorrect:
        return kNegative;
      case mll::Status::unknown:
        return kUnknown;
    }
    return kUnknown;
  }

  int translate() const {
    const auto s = load_structure(translate_file);
    if (!report_validation(s)) return kNegative;
    std::cout << "# vehicle\n" << print_constellation(mll::vehicle(s));
    std::cout << "# cuts\n" << print_constellation(mll::cuts(s));
    std::cout << "# comp\n" << print_constellation(mll::comp(s));
    for (const auto& phi : mll::switchings(s)) {
      std::cout << "# test " << phi.to_string() << '\n' << print_constellation(mll::test_of(s, phi));
    }
    return kOk;
  }

  int normalise() const {
    const auto s = load_structure(normalise_file);
    if (!report_validation(s)) return kNegative;
    const mll::ProofStructure nf = mll::normal_form(s);
    const Constellation by_rewriting = colour_wrap(mll::vehicle(nf), "c", Polarity::plus);
    const ExecutionResult r = mll::normalise_via_execution(s, engine.options());
    const bool cut_free = nf.edges_of(mll::EdgeKind::cut).empty();
    const bool agree = r.complete && cut_free && equivalent_multisets(by_rewriting, r.stars);
    if (format == "json") {
      json j = {{"format_version", kFormatVersion},
                {"normal_form", json::parse(mll::to_json(nf))},
                {"cut_free", cut_free},
                {"execution", execution_json(r)},
                {"agree", agree}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << "# normal form (rewriting)\n" << mll::to_json(nf) << '\n';
      std::cout << "# vehicle of the normal form\n" << print_constellation(mll::vehicle(nf));
      std::cout << "# Ex(comp)\n";
      print_stars(std::cout, r.stars);
      print_completion(std::cout, r);
      std::cout << "agree: " << (agree ? "true" : "false") << '\n';
    }
    return r.complete ? kOk : kUnknown;
  }
};

struct TypeCheckCommand {
  std::string file;
  std::string sequent;
  std::string rel = "R";
  std::string format = "text";
  EngineFlags engine;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("type-check", "orthogonality to the tests of a sequent");
    app->add_option("VEHICLE", file, "constellation file")->required();
    app->add_option("--sequent", sequent, "e.g. \"X1^\xE2\x8A\xA5 \xE2\x85\x8B X2^\xE2\x8A\xA5, X1 \xE2\x8A\x97 X2\"")
        ->required();
    app->add_option("--rel", rel, "fin | one | R")->check(CLI::IsMember({"fin", "one", "R"}));
    app->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    engine.attach(app);
    app->callback([this] { exit_code = run(); });
  }
  int run() const {
    const Constellation phi = parse_constellation(read_file(file));
    const mll::Sequent gamma = mll::parse_sequent(sequent);
    const mll::Relation relation = *mll::parse_relation(rel);
    const mll::TypeCheck t = mll::type_check(phi, gamma, relation, engine.options());
    const std::string verdict = t.answer == mll::Answer::yes  ? "typed"
                                : t.answer == mll::Answer::no ? "not typed"
                                                              : "unknown";
    if (format == "json") {
      json tests = json::array();
      for (const auto& o : t.tests) {
        tests.push_back({{"answer", mll::to_string(o.answer)}, {"reason", o.reason}, {"execution", execution_json(o.execution)}});
      }
      json j = {{"format_version", kFormatVersion}, {"sequent", mll::to_string(gamma)}, {"relation", rel},
                {"verdict", verdict},               {"proof_like", t.proof_like},      {"tests", tests}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << verdict << '\n'
                << "sequent: " << mll::to_string(gamma) << '\n'
                << "proof-like: " << (t.proof_like ? "true" : "false") << '\n';
      for (std::size_t i = 0; i < t.tests.size(); ++i) {
        std::cout << "  test " << i + 1 << ": " << mll::to_string(t.tests[i].answer) << " (" << t.tests[i].reason << ")\n";
      }
    }
    switch (t.answer) {
      case mll::Answer::yes:
        return kOk;
      case mll::Answer::no:
        return kNegative;
      case mll::Answer::unknown:
        return kUnknown;
    }
    return kUnknown;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stellar resolution engine"};
  app.require_subcommand(1);
  ExecCommand exec_cmd;
  DgraphCommand dgraph_cmd;
  PropsCommand props_cmd;
  LpCommand lp_cmd;
  TmCommand tm_cmd;
  AtamCommand atam_cmd;
  MllCommand mll_cmd;
  TypeCheckCommand type_cmd;
  exec_cmd.attach(app);
  dgraph_cmd.attach(app);
  props_cmd.attach(app);
  lp_cmd.attach(app);
  tm_cmd.attach(app);
  atam_cmd.attach(app);
  mll_cmd.attach(app);
  type_cmd.attach(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "syntax error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return exit_code;
}
