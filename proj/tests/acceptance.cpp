// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.  Seeds, instance counts and time limits are fixed here.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stellar/constellation.hpp"
#include "stellar/encodings.hpp"
#include "stellar/engine.hpp"
#include "stellar/mll.hpp"
#include "stellar/syntax.hpp"
#include "support/oracles.hpp"
#include "support/suites.hpp"

#ifndef STELLAR_DATA_DIR
#define STELLAR_DATA_DIR "data"
#endif

namespace {

using namespace stellar;
using namespace stellar::testing;
using Clock = std::chrono::steady_clock;

// Pinned limits.
constexpr double unification_limit_s = 5.0;
constexpr double two_plus_two_limit_s = 1.0;
constexpr double verdict_limit_s = 1.0;
constexpr double tm_limit_s = 10.0;
constexpr std::size_t unification_problems = 1000;
constexpr std::size_t fusion_constellations = 100;
constexpr std::size_t confluence_instances = 100;
constexpr std::size_t incorrect_cut_bound = 40;
constexpr std::size_t incorrect_cut_min_empty = incorrect_cut_bound / 4;
constexpr std::size_t generated_nets = 50;
constexpr std::size_t lemma_instances = 100;
constexpr std::size_t atam_budget = 5000;
constexpr std::size_t atam_max_tiles = 4;

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(STELLAR_DATA_DIR) + "/" + name);
  if (!in) throw std::runtime_error("cannot read " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::cout << (out.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << " -- " << out.detail << std::endl;
}

Outcome unification() {
  const auto start = Clock::now();
  const auto report = unification_suite(0xC0FFEE, unification_problems);
  const double t = seconds_since(start);
  return {report.ok() && report.instances >= unification_problems && t < unification_limit_s,
          report.summary() + "; " + fixed(t) + " s (limit " + fixed(unification_limit_s, 1) + " s)"};
}

Outcome two_plus_two() {
  const Constellation phi = parse_constellation(read_file("add2p2.stl"));
  const auto start = Clock::now();
  const auto result = execute(phi);
  const double t = seconds_since(start);
  const Star four = parse_star("[s(s(s(s(0))))]");
  const bool exact = result.stars.size() == 1 && alpha_equivalent(result.stars[0], four);
  return {exact && result.complete && t < two_plus_two_limit_s,
          "Ex = " + result.stars.to_string() + ", complete: " + (result.complete ? "true" : "false") + "; " +
              fixed(t) + " s (limit " + fixed(two_plus_two_limit_s, 1) + " s)"};
}

Outcome fusion() {
  const auto report = fusion_suite(0xF05E, fusion_constellations);
  return {report.ok() && report.instances == fusion_constellations, report.summary()};
}

Outcome confluence() {
  const auto report = confluence_suite(0xC0F1, confluence_instances);
  return {report.ok() && report.instances == confluence_instances, report.summary()};
}

Outcome cut_examples() {
  const auto good = mll::parse_proof_structure(read_file("correct_cut.psj"));
  const auto ex = mll::normalise_via_execution(good);
  const Star printed = parse_star("[+c(p3(X)), +c(p6(X))]");
  const bool good_ok = ex.complete && ex.stars.size() == 1 && alpha_equivalent(ex.stars[0], printed);

  const auto bad = mll::parse_proof_structure(read_file("incorrect_cut.psj"));
  EngineOptions options;
  options.max_vertices = incorrect_cut_bound;
  const auto loop = mll::normalise_via_execution(bad, options);
  const bool all_empty = std::all_of(loop.stars.stars.begin(), loop.stars.stars.end(), [](const Star& s) { return s.empty(); });
  const bool bad_ok = all_empty && !loop.complete && loop.stars.size() >= incorrect_cut_min_empty;
  return {good_ok && bad_ok, "correct cut: Ex = " + ex.stars.to_string() + "; incorrect cut at bound " +
                                 std::to_string(incorrect_cut_bound) + ": " + std::to_string(loop.stars.size()) +
                                 (all_empty ? " empty stars" : " stars (not all empty)") + ", complete: " +
                                 (loop.complete ? "true" : "false") + " (need ≥ " +
                                 std::to_string(incorrect_cut_min_empty) + ")"};
}

Outcome correctness_criterion() {
  std::vector<std::string> notes;
  bool pass = true;
  auto timed = [&](const std::string& what, const std::function<bool()>& f) {
    const auto start = Clock::now();
    const bool ok = f();
    const double t = seconds_since(start);
    pass = pass && ok && t < verdict_limit_s;
    notes.push_back(what + (ok ? " ok" : " WRONG") + " (" + fixed(t) + " s)");
  };
  timed("net MLL-correct", [] {
    const auto v = mll::check(mll::parse_proof_structure(read_file("correct_net.psj")));
    if (v.status != mll::Status::mll_correct || v.evidence.size() != 2) return false;
    for (const auto& e : v.evidence) {
      if (!e.execution || e.execution->stars.size() != 1 ||
          !equivalent_up_to_ray_order(e.execution->stars[0], v.conclusions)) {
        return false;
      }
    }
    return true;
  });
  timed("wrong linking fails ⊥R", [] {
    const auto gamma = mll::parse_sequent("p1: X1⊥ ⅋ X2⊥, p2: X1 ⊗ X2");
    const auto wrong = mll::type_check(parse_constellation(read_file("wrong_linking.stl")), gamma, mll::Relation::R);
    const auto right = mll::type_check(parse_constellation(read_file("linking.stl")), gamma, mll::Relation::R);
    return wrong.answer == mll::Answer::no && right.answer == mll::Answer::yes;
  });
  timed("two axioms MIX-only", [] {
    return mll::check(mll::parse_proof_structure(read_file("two_axioms.psj"))).status == mll::Status::mix_only;
  });
  timed("loop incorrect with cycle", [] {
    const auto v = mll::check(mll::parse_proof_structure(read_file("loop.psj")));
    const bool witness = std::any_of(v.evidence.begin(), v.evidence.end(),
                                     [](const mll::SwitchingEvidence& e) { return !e.acyclic && !e.cycle.empty(); });
    return v.status == mll::Status::incorrect && witness;
  });
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {pass, detail + " (limit " + fixed(verdict_limit_s, 1) + " s each)"};
}

Outcome cut_elimination() {
  const auto report = cut_elimination_suite(0xC07, generated_nets);
  return {report.ok() && report.instances == generated_nets, report.summary()};
}

Outcome turing_machine() {
  const TuringMachine m = parse_turing_machine(read_file("ab_machine.tm"));
  const auto start = Clock::now();
  std::vector<std::string> words{""};
  for (std::size_t len = 1; len <= 4; ++len) {
    const std::size_t first = words.size();
    for (std::size_t i = 0; i < first; ++i) {
      if (words[i].size() != len - 1) continue;
      words.push_back(words[i] + "a");
      words.push_back(words[i] + "b");
    }
  }
  std::size_t agree = 0;
  std::string mismatch;
  std::map<std::string, TmVerdict> verdicts;
  for (const auto& w : words) {
    const TmVerdict v = run_ntm(m, w).verdict;
    verdicts[w] = v;
    const TmOutcome o = run_two_stack(m, w);
    const bool same = (v == TmVerdict::accept && o == TmOutcome::accept) || (v == TmVerdict::reject && o == TmOutcome::reject);
    if (same) {
      ++agree;
    } else if (mismatch.empty()) {
      mismatch = "first mismatch on \"" + w + "\": " + to_string(v);
    }
  }
  const double t = seconds_since(start);
  bool named = verdicts[""] == TmVerdict::accept;
  for (const char* w : {"ab", "ba", "abab"}) named = named && verdicts[w] == TmVerdict::accept;
  for (const char* w : {"a", "b", "aab"}) named = named && verdicts[w] == TmVerdict::reject;
  return {agree == words.size() && named && t < tm_limit_s,
          std::to_string(agree) + "/" + std::to_string(words.size()) + " words agree with the two-stack oracle" +
              (mismatch.empty() ? "" : " (" + mismatch + ")") + "; named verdicts " + (named ? "ok" : "WRONG") + "; " +
              fixed(t) + " s (limit " + fixed(tm_limit_s, 1) + " s)"};
}

Outcome logic_program() {
  LogicProgram add;
  add.facts.push_back(parse_term("add(0, Y, Y)"));
  add.rules.push_back({{parse_term("add(X, Y, Z)")}, parse_term("add(s(X), Y, s(Z))")});
  std::vector<Term> universe;
  for (unsigned k = 0; k <= 8; ++k) universe.push_back(encode_nat(k));
  const auto model = BottomUp(universe).fixpoint(add);
  std::size_t agree = 0, total = 0;
  std::string mismatch;
  for (unsigned n = 0; n <= 4; ++n) {
    for (unsigned m = 0; m <= 4; ++m) {
      ++total;
      std::set<unsigned> oracle;
      for (unsigned k = 0; k <= 8; ++k) {
        const Term fact = Term::application("add", {encode_nat(n), encode_nat(m), encode_nat(k)});
        if (model.count(fact)) oracle.insert(k);
      }
      const Term query = Term::application("add", {encode_nat(n), encode_nat(m), Term::variable("R")});
      const auto result = run_logic_program(add, query);
      std::set<unsigned> engine;
      bool well_formed = result.complete;
      for (const auto& s : result.stars.stars) {
        const auto k = s.size() == 1 ? decode_nat(s.rays[0]) : std::nullopt;
        if (!k) {
          well_formed = false;
        } else {
          engine.insert(*k);
        }
      }
      const bool ok = well_formed && result.stars.size() == 1 && engine == oracle && oracle == std::set<unsigned>{n + m};
      if (ok) {
        ++agree;
      } else if (mismatch.empty()) {
        mismatch = "first mismatch at add(" + std::to_string(n) + ", " + std::to_string(m) + ", R): " + result.stars.to_string();
      }
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " queries return exactly {n+m} and match the fixpoint" +
                              (mismatch.empty() ? "" : " (" + mismatch + ")")};
}

std::vector<Cell> cells_of(const TileSystem& system, const Assembly& a) {
  std::vector<Cell> out;
  for (const auto& p : a.placement) out.push_back({system.tiles[p.tile].name, p.x, p.y});
  return out;
}

Outcome tile_assembly() {
  const TileSystem coop = parse_tile_system(read_file("cooperation.tiles"));
  EngineOptions options;
  options.max_expansions = atam_budget;
  const auto r2 = enumerate_assemblies(coop, atam_max_tiles, options);
  bool block = false, stable = true;
  std::size_t unanchored = 0;
  for (const auto& a : r2.assemblies) {
    if (!a.anchored) {
      ++unanchored;
      continue;
    }
    auto cells = cells_of(coop, a);
    long x0 = cells.front().x, y0 = cells.front().y;
    for (const auto& c : cells) {
      x0 = std::min(x0, c.x);
      y0 = std::min(y0, c.y);
    }
    std::set<std::tuple<std::string, long, long>> shape;
    for (const auto& c : cells) shape.emplace(c.tile, c.x - x0, c.y - y0);
    const std::set<std::tuple<std::string, long, long>> expected{{"A", 0, 0}, {"B", 1, 0}, {"C", 0, 1}, {"D", 1, 1}};
    block = block || shape == expected;
    stable = stable && brute_force_stable(coop, cells);
  }

  const TileSystem weak = parse_tile_system(read_file("weak.tiles"));
  const auto r3 = enumerate_assemblies(weak, atam_max_tiles);
  const bool none = r3.assemblies.empty() && (r3.complete || r3.incomplete_reason == "tile bound");
  std::size_t weak_unstable = 0;
  for (const auto& a : r3.assemblies) weak_unstable += brute_force_stable(weak, cells_of(weak, a)) ? 0 : 1;

  return {block && stable && unanchored == 0 && none && weak_unstable == 0,
          "τ=2: " + std::to_string(r2.assemblies.size()) + " assemblies under budget " + std::to_string(atam_budget) +
              ", 2×2 block " + (block ? "found" : "MISSING") + ", all stable: " + (stable ? "yes" : "NO") +
              "; τ=3: " + std::to_string(r3.assemblies.size()) + " assemblies (" +
              (r3.complete ? "complete" : r3.incomplete_reason) + ")"};
}

Outcome lemmas() {
  struct Named {
    const char* name;
    SuiteReport report;
  };
  std::vector<Named> suites;
  suites.push_back({"termination", termination_suite(0x7E, lemma_instances)});
  suites.push_back({"uniqueness", uniqueness_suite(0x0E, lemma_instances)});
  suites.push_back({"exactness", exactness_suite(0xE7, lemma_instances)});
  suites.push_back({"independence", independence_suite(0x1D, lemma_instances)});
  suites.push_back({"structural realisation", structural_realisation_suite(0x57, lemma_instances)});
  suites.push_back({"deterministic+exact", deterministic_exact_suite(0xDE, lemma_instances)});
  bool pass = true;
  std::string detail;
  for (const auto& s : suites) {
    const bool ok = s.report.ok() && s.report.instances >= lemma_instances;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : " | ") + s.name + ": " + (ok ? "ok" : "FAILED") + " (" + s.report.summary() + ")";
  }
  return {pass, detail};
}

}  // namespace

int main() {
  criterion(1, "unification agrees with brute-force grounding", unification);
  criterion(2, "2+2 executes to [s(s(s(s(0))))]", two_plus_two);
  criterion(3, "fusion in every order equals actualisation", fusion);
  criterion(4, "confluence of execution over disjoint colour sets", confluence);
  criterion(5, "correct and incorrect cut-elimination examples", cut_examples);
  criterion(6, "stellar correctness criterion verdicts", correctness_criterion);
  criterion(7, "cut-elimination by execution matches rewriting", cut_elimination);
  criterion(8, "Turing machine simulation matches a two-stack interpreter", turing_machine);
  criterion(9, "logic program addition matches the bottom-up fixpoint", logic_program);
  criterion(10, "tile assembly cooperation and stability", tile_assembly);
  criterion(11, "structural lemma suites", lemmas);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
