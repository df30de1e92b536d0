// Constellations: α-equivalence, dependency graphs, properties, colour
// operations and shared variables.

#include "doctest.h"

#include "stellar/constellation.hpp"
#include "stellar/engine.hpp"
#include "stellar/syntax.hpp"
#include "support/generators.hpp"
#include "support/graphs.hpp"

using namespace stellar;
using namespace stellar::testing;

namespace {

Constellation c(const char* text) { return parse_constellation(text); }
Star s(const char* text) { return parse_star(text); }

const char* const two_plus_two = "[+add(0,Y,Y)]; [-add(X,Y,Z), +add(s(X),Y,s(Z))]; [-add(s(s(0)),s(s(0)),R), R];";

}  // namespace

TEST_CASE("alpha-equivalence of stars") {
  CHECK(alpha_equivalent(s("[+f(X)]"), s("[+f(Y)]")));
  CHECK_FALSE(alpha_equivalent(s("[+f(X), X]"), s("[+f(Y), Z]")));
  CHECK(alpha_equivalent(s("[-a(X), +b(X)]"), s("[-a(U), +b(U)]")));
  CHECK_FALSE(alpha_equivalent(s("[a, b]"), s("[b, a]")));
  CHECK(equivalent_up_to_ray_order(s("[a(X), b(Y)]"), s("[b(Z), a(W)]")));
  CHECK(equivalent_multisets(c("[a]; [b(X)];"), c("[b(Y)]; [a];")));
  CHECK_FALSE(equivalent_multisets(c("[a]; [a];"), c("[a];")));
}

TEST_CASE("dependency graphs") {
  const DependencyGraph g(c(two_plus_two), ColourSet::all());
  CHECK(g.vertex_count() == 3);
  // base–recursion, recursion loop, recursion–query (0 and s(s(0)) clash).
  CHECK(g.edges().size() == 3);
  std::size_t loops = 0;
  for (const auto& e : g.edges()) loops += e.a.star == e.b.star ? 1 : 0;
  CHECK(loops == 1);
  CHECK(g.connected());
  CHECK_FALSE(g.acyclic());

  const DependencyGraph loop(c("[-c(X), +c(X)];"), ColourSet::all());
  CHECK(loop.vertex_count() == 1);
  CHECK(loop.edges().size() == 1);

  CHECK(DependencyGraph(Constellation{}, ColourSet::all()).edges().empty());
}

TEST_CASE("dependency edges agree with pairwise matchability") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    ConstellationShape shape;
    shape.colours = {"c", "d"};
    const Constellation phi = random_constellation(rng, shape);
    const auto colours = coin(rng) ? ColourSet::all() : ColourSet::of({"c"});
    const DependencyGraph g(phi, colours);
    const auto pairs = dual_pairs(phi, colours);
    REQUIRE(g.edges().size() == pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      CHECK(g.edges()[k].a == pairs[k].a);
      CHECK(g.edges()[k].b == pairs[k].b);
    }
    CHECK(g.acyclic() == acyclic_by_pairs(phi, colours));
    CHECK(g.components() == components_by_pairs(phi, colours));
  }
}

TEST_CASE("property analysis") {
  const PropertyReport amb = analyze(c("[+a(X),+a(X)]; [-a(X),-a(X),X];"), ColourSet::all());
  CHECK(amb.exact);
  CHECK(amb.connected);
  CHECK_FALSE(amb.acyclic);
  CHECK_FALSE(amb.monovalent);

  const PropertyReport add = analyze(c(two_plus_two), ColourSet::all());
  CHECK(add.connected);
  CHECK_FALSE(add.acyclic);
  CHECK_FALSE(add.monovalent);
  CHECK_FALSE(add.exact);

  const PropertyReport single = analyze(c("[a(X)];"), ColourSet::all());
  CHECK(single.acyclic);
  CHECK(single.connected);
  CHECK(single.monovalent);
  CHECK(single.exact);
}

TEST_CASE("disjoint union") {
  const Constellation phi = c("[a]; [b(X)];");
  CHECK(equivalent_multisets(disjoint_union(phi, {}), phi));
  CHECK(disjoint_union({}, {}).empty());
  CHECK(disjoint_union(phi, phi).size() == 4);
}

TEST_CASE("colour wrapping") {
  const Constellation wrapped = colour_wrap(c("[p7(l.X), p7(r.X)];"), "c", Polarity::plus);
  CHECK(alpha_equivalent(wrapped[0], s("[+c(p7(l.X)), +c(p7(r.X))]")));
  CHECK(colour_wrap({}, "t", Polarity::plus).empty());
  CHECK(alpha_equivalent(colour_wrap(c("[p5(X), p6(X)];"), "c", Polarity::minus)[0], s("[-c(p5(X)), -c(p6(X))]")));
  CHECK_THROWS_AS(colour_wrap(c("[+c(X)];"), "c", Polarity::plus), std::invalid_argument);
}

TEST_CASE("colour shifts") {
  const Constellation vehicle = c("[+c(p1(X)), +c(p2(X))];");
  const Constellation shifted = colour_shift(vehicle, {{"c", "t"}});
  CHECK(alpha_equivalent(shifted[0], s("[+t(p1(X)), +t(p2(X))]")));
  const Constellation phi = c("[+c(X), -d(X)]; [-c(0)];");
  const Constellation same = colour_shift(phi, {{"c", "c"}, {"d", "d"}});
  for (std::size_t i = 0; i < phi.size(); ++i) CHECK(same[i] == phi[i]);
  CHECK_THROWS_AS(colour_shift(phi, {{"c", "e"}, {"d", "e"}}), std::invalid_argument);
  CHECK_THROWS_AS(colour_shift(phi, {{"c", "e"}}), std::invalid_argument);
}

TEST_CASE("colour shifts preserve the dependency graph up to isomorphism") {
  Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    ConstellationShape shape;
    shape.colours = {"c", "d"};
    const Constellation phi = random_constellation(rng, shape);
    std::map<std::string, std::string> mu;
    const bool swap = coin(rng);
    for (const auto& name : colour_names(phi)) mu[name] = swap ? (name == "c" ? "d" : "c") : name + "2";
    const Constellation shifted = colour_shift(phi, mu);
    CHECK(isomorphic(star_graph(DependencyGraph(phi, ColourSet::all())),
                     star_graph(DependencyGraph(shifted, ColourSet::all()))));
  }
}

TEST_CASE("shared variables") {
  const Constellation phi = c("[X, +c(X)]; [-c(l.X)];");
  const Constellation psi = c("[-c(r.X)];");
  const auto shared = shared_variables(phi, psi, ColourSet::all());
  REQUIRE(shared.size() == 1);
  CHECK(shared.begin()->star == 0);
  CHECK(var_to_string(shared.begin()->var) == "X");

  CHECK(shared_variables(c("[+a(X), Y]; [-a(X)];"), c("[+b(X)]; [-b(Y)];"), ColourSet::all()).empty());
}

TEST_CASE("shared variables are symmetric") {
  Rng rng(44);
  for (int i = 0; i < 200; ++i) {
    ConstellationShape shape;
    shape.max_stars = 3;
    const Constellation a = random_constellation(rng, shape);
    const Constellation b = random_constellation(rng, shape);
    // Occurrences are indexed in a ⊎ b and b ⊎ a respectively.
    std::set<VariableOccurrence> ab = shared_variables(a, b, ColourSet::all());
    std::set<VariableOccurrence> ba;
    for (auto occ : shared_variables(b, a, ColourSet::all())) {
      occ.star = occ.star < b.size() ? occ.star + a.size() : occ.star - b.size();
      ba.insert(occ);
    }
    CHECK(ab == ba);
  }
}

TEST_CASE("concealment and noise") {
  CHECK(equivalent_multisets(conceal(c("[+f(X)]; [a(X)];")), c("[a(X)];")));
  CHECK(conceal({}).empty());
  CHECK(equivalent_multisets(filter_noise(c("[]; [a]; [];")), c("[a];")));
}
