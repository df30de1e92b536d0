// Formulas, proof-structures, translation, cut-elimination and correctness.

#include "doctest.h"

#include <fstream>
#include <sstream>

#include "stellar/mll.hpp"
#include "stellar/syntax.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace stellar;
using namespace stellar::mll;
using namespace stellar::testing;

namespace {

Star s(const char* text) { return parse_star(text); }
Constellation c(const char* text) { return parse_constellation(text); }

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(STELLAR_DATA_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ProofStructure load(const char* name) { return parse_proof_structure(read_data(name)); }

/// Adds `offset` to every vertex identifier.
ProofStructure renumber(const ProofStructure& in, VertexId offset) {
  ProofStructure out;
  for (auto v : in.vertices) out.vertices.push_back(v + offset);
  for (auto e : in.edges) {
    for (auto& v : e.sources) v += offset;
    for (auto& v : e.targets) v += offset;
    out.edges.push_back(e);
  }
  for (const auto& [v, f] : in.labels) out.labels[v + offset] = f;
  return out;
}

}  // namespace

TEST_CASE("formulas") {
  const Formula f = parse_formula("X1 ⊗ (X2⊥ ⅋ X3)");
  CHECK(f.kind == Formula::Kind::tensor);
  CHECK(f.dual() == parse_formula("X1⊥ ⅋ (X2 ⊗ X3⊥)"));
  CHECK(f.dual().dual() == f);
  CHECK(parse_formula("~(A * B)") == parse_formula("A^⊥ | B'"));
  CHECK(parse_formula(f.to_string()) == f);
  CHECK_THROWS_AS(parse_formula("A ⊗ B ⅋ C"), ParseError);

  const Sequent gamma = parse_sequent("⊢ X1⊥ ⅋ X2⊥, q: X1 ⊗ X2");
  REQUIRE(gamma.size() == 2);
  CHECK(gamma[0].name == "p1");
  CHECK(gamma[1].name == "q");
}

TEST_CASE("proof-structure validation") {
  const ProofStructure s8 = load("correct_cut.psj");
  CHECK(validate(s8).empty());
  CHECK(s8.conclusions() == std::vector<VertexId>{3, 6});
  CHECK(s8.atoms() == std::vector<VertexId>{1, 2, 3, 4, 5, 6});

  ProofStructure twice = s8;
  twice.edges.push_back({EdgeKind::ax, {}, {1, 3}});
  CHECK_FALSE(validate(twice).empty());

  // Two ⊗ conclusions cut against each other.
  ProofStructure bad_cut;
  bad_cut.vertices = {1, 2, 3, 4, 5, 6};
  bad_cut.edges = {{EdgeKind::ax, {}, {1, 3}},
                   {EdgeKind::ax, {}, {2, 4}},
                   {EdgeKind::tensor, {1, 2}, {5}},
                   {EdgeKind::tensor, {3, 4}, {6}},
                   {EdgeKind::cut, {5, 6}, {}}};
  CHECK_FALSE(validate(bad_cut).empty());

  CHECK(parse_proof_structure(to_json(s8)).edges == s8.edges);
}

TEST_CASE("addresses and translation") {
  const ProofStructure s8 = load("correct_cut.psj");
  CHECK(address_ray(s8, 1) == parse_term("p7(l.X)"));
  CHECK(address_ray(s8, 3) == parse_term("p3(X)"));
  CHECK_THROWS_AS(address(s8, 7), std::invalid_argument);

  CHECK(equivalent_multisets(comp(s8), c("[+c(p7(l.X)), +c(p7(r.X))]; [+c(p3(X)), +c(p8(l.X))];"
                                         "[+c(p8(r.X)), +c(p6(X))]; [-c(p7(X)), -c(p8(X))];")));
  CHECK(equivalent_multisets(comp(load("incorrect_cut.psj")),
                             c("[+c(p5(l.X)), +c(p6(l.X))]; [+c(p5(r.X)), +c(p6(r.X))]; [-c(p5(X)), -c(p6(X))];")));

  const ProofStructure lone = load("two_axioms.psj");
  CHECK(alpha_equivalent(vehicle(lone)[0], s("[p1(X), p2(X)]")));
  CHECK(cuts(lone).empty());
}

TEST_CASE("cut-elimination") {
  const ProofStructure s8 = load("correct_cut.psj");
  const ProofStructure nf = normal_form(s8);
  CHECK(nf.edges_of(EdgeKind::cut).empty());
  REQUIRE(nf.edges.size() == 1);
  CHECK(nf.edges[0].kind == EdgeKind::ax);
  std::vector<VertexId> ends = nf.edges[0].targets;
  std::sort(ends.begin(), ends.end());
  CHECK(ends == std::vector<VertexId>{3, 6});
  CHECK_FALSE(reduce(nf).has_value());

  const auto ex = normalise_via_execution(s8);
  REQUIRE(ex.stars.size() == 1);
  CHECK(alpha_equivalent(ex.stars[0], s("[+c(p3(X)), +c(p6(X))]")));

  const ProofStructure net = load("correct_net.psj");
  CHECK(equivalent_multisets(normalise_via_execution(net).stars, colour_wrap(vehicle(net), "c", Polarity::plus)));

  EngineOptions options;
  options.max_vertices = 12;
  const auto loop = normalise_via_execution(load("incorrect_cut.psj"), options);
  CHECK_FALSE(loop.complete);
  CHECK_FALSE(loop.stars.empty());
  for (const auto& star : loop.stars.stars) CHECK(star.empty());
}

TEST_CASE("switchings and tests") {
  const ProofStructure net = load("correct_net.psj");
  CHECK(switchings(net).size() == 2);
  CHECK(switchings(load("two_axioms.psj")).size() == 1);
  CHECK_FALSE(correctness_graph(load("loop.psj"), {}).acyclic());

  const ProofStructure loop = load("loop.psj");
  const Constellation test = test_of(loop, switchings(loop)[0]);
  bool found = false;
  for (const auto& star : test.stars) found = found || alpha_equivalent(star, s("[-t(p3(l.X)), +c(p1(g.X))]"));
  CHECK(found);
}

TEST_CASE("correctness verdicts") {
  const Verdict net = check(load("correct_net.psj"));
  CHECK(net.status == Status::mll_correct);
  CHECK(equivalent_up_to_ray_order(net.conclusions, s("[p5(X), p6(X)]")));
  CHECK(check(load("two_axioms.psj")).status == Status::mix_only);
  CHECK(check(load("loop.psj")).status == Status::incorrect);
  CHECK(check(load("correct_cut.psj")).status == Status::mll_correct);
}

TEST_CASE("the stellar criterion agrees with Danos–Regnier") {
  Rng rng(0xD4);
  for (int i = 0; i < 40; ++i) {
    const ProofStructure net = random_proof_net(rng, 4, 1, coin(rng));
    const auto dr = danos_regnier(net);
    bool acyclic = true, connected = true;
    for (auto [a, k] : dr) {
      acyclic = acyclic && a;
      connected = connected && k;
    }
    const Status expected = !acyclic ? Status::incorrect : connected ? Status::mll_correct : Status::mix_only;
    CHECK(check(net).status == expected);
  }
}

TEST_CASE("verdicts are invariant under renumbering and colour shifts") {
  Rng rng(0x5E);
  for (int i = 0; i < 20; ++i) {
    const ProofStructure net = random_proof_net(rng, 4, 1, coin(rng));
    const ProofStructure moved = renumber(net, 100);
    CHECK(check(net).status == check(moved).status);
    const auto a = normalise_via_execution(net);
    const auto b = normalise_via_execution(moved);
    CHECK(a.stars.size() == b.stars.size());
  }
  const ProofStructure net = load("correct_net.psj");
  const Constellation vehicle_t = tested_vehicle(net);
  CHECK(equivalent_multisets(vehicle_t, colour_shift(colour_wrap(vehicle(net), "c", Polarity::plus), {{"c", "t"}})));
}

TEST_CASE("label checking") {
  const ProofStructure net = load("correct_net.psj");
  CHECK(check_labels(net, net.labels).empty());
  auto wrong = net.labels;
  wrong[3] = parse_formula("X2⊥");
  CHECK_FALSE(check_labels(net, wrong).empty());
  CHECK(check_labels(net, synthesize_labels(net)).empty());
}

TEST_CASE("orthogonality") {
  const ProofStructure net = load("correct_net.psj");
  const Switching second = switchings(net)[1];
  CHECK(orthogonal(tested_vehicle(net), test_of(net, second), Relation::R).answer == Answer::yes);
  CHECK(orthogonal(c("[a]; [b(X)];"), c("[+c(X)]; [-c(0)];"), Relation::fin).answer == Answer::yes);
  EngineOptions options;
  options.max_vertices = 10;
  const auto fin = orthogonal(comp(load("incorrect_cut.psj")), {}, Relation::fin, options);
  CHECK(fin.answer == Answer::no);
  CHECK(fin.infinite_witness);
  CHECK(parse_relation("fin") == Relation::fin);
  CHECK_FALSE(parse_relation("nope").has_value());
}

TEST_CASE("typing") {
  const Sequent gamma = parse_sequent("p1: X1⊥ ⅋ X2⊥, p2: X1 ⊗ X2");
  CHECK(sequent_tests(gamma).size() == 2);
  CHECK(sequent_tests(parse_sequent("X1, X1⊥")).size() == 1);

  const Constellation right = c("[p1(l.X), p2(l.X)]; [p1(r.X), p2(r.X)];");
  const Constellation wrong = c("[p1(l.X), p1(r.X)]; [p2(l.X), p2(r.X)];");
  CHECK(proof_like(right, gamma));
  CHECK(proof_like(wrong, gamma));
  CHECK(type_check(right, gamma, Relation::R).answer == Answer::yes);
  CHECK(type_check(wrong, gamma, Relation::R).answer == Answer::no);
  CHECK(type_check({}, gamma, Relation::R).answer == Answer::no);
}
