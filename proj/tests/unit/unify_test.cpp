// Substitutions, Martelli–Montanari unification, matchability, resolution.

#include "doctest.h"

#include "stellar/syntax.hpp"
#include "stellar/unify.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace stellar;
using namespace stellar::testing;

namespace {

Term t(const char* text) { return parse_term(text); }

Substitution bindings(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  Substitution s;
  for (const auto& [x, u] : pairs) s.bind(t(x).var(), t(u));
  return s;
}

}  // namespace

TEST_CASE("applying substitutions") {
  CHECK(bindings({{"X", "0"}}).apply(t("add(X,Y,Y)")) == t("add(0,Y,Y)"));
  CHECK(Substitution{}.apply(t("f(X, g(Y))")) == t("f(X, g(Y))"));
  CHECK(bindings({{"X2", "0"}, {"Y2", "Y1"}, {"Z2", "Y1"}}).apply(t("add(s(X2),Y2,s(Z2))")) == t("add(s(0),Y1,s(Y1))"));
}

TEST_CASE("composition") {
  const Substitution theta = bindings({{"X", "f(Y)"}});
  CHECK(compose(Substitution{}, theta).apply(t("X")) == theta.apply(t("X")));
  CHECK(compose(bindings({{"Y", "a"}}), theta).apply(t("X")) == t("f(a)"));

  Rng rng(11);
  const std::vector<std::string> vars{"X", "Y", "Z"};
  auto random_subst = [&] {
    Substitution s;
    for (const auto& v : vars) {
      if (coin(rng)) s.bind(t(v.c_str()).var(), random_fga_term(rng, vars, 2));
    }
    return s;
  };
  for (int i = 0; i < 100; ++i) {
    const Substitution a = random_subst(), b = random_subst(), c = random_subst();
    const Term probe = random_fga_term(rng, vars, 3);
    CHECK(compose(compose(a, b), c).apply(probe) == compose(a, compose(b, c)).apply(probe));
    CHECK(compose(a, b).apply(probe) == a.apply(b.apply(probe)));
  }
}

TEST_CASE("solve on the worked equations") {
  const SolveResult r = solve({{t("add(0,Y,Y)"), t("add(X2,Y2,Z2)")}});
  REQUIRE(r.ok());
  CHECK(r.unifier().apply(t("X2")) == t("0"));
  CHECK(r.unifier().apply(t("Y2")) == r.unifier().apply(t("Y")));
  CHECK(r.unifier().apply(t("Z2")) == r.unifier().apply(t("Y")));

  const SolveResult occurs = solve({{t("X"), t("s(X)")}});
  REQUIRE_FALSE(occurs.ok());
  CHECK(occurs.failure().kind == FailureKind::occurs_check);

  const SolveResult same = solve({{t("f(X)"), t("f(X)")}});
  REQUIRE(same.ok());
  CHECK(same.unifier().empty());

  CHECK(solve({{t("f(a)"), t("g(a, a)")}}).failure().kind == FailureKind::symbol_clash);
}

TEST_CASE("the solved form does not depend on the selection order") {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const UnificationProblem p = random_unification_problem(rng);
    const SolveResult fifo = solve(p, {SelectionOrder::fifo, 0});
    const SolveResult lifo = solve(p, {SelectionOrder::lifo, 0});
    const SolveResult shuffled = solve(p, {SelectionOrder::shuffled, static_cast<std::uint64_t>(i)});
    REQUIRE(fifo.ok() == lifo.ok());
    REQUIRE(fifo.ok() == shuffled.ok());
    if (!fifo.ok()) continue;
    for (const auto& eq : p) {
      // Unifiers that are equal up to renaming make the images α-equivalent.
      const Term a = fifo.unifier().apply(Term::application("eq", {eq.lhs, eq.rhs}));
      CHECK(alpha_equivalent(a, lifo.unifier().apply(Term::application("eq", {eq.lhs, eq.rhs}))));
      CHECK(alpha_equivalent(a, shuffled.unifier().apply(Term::application("eq", {eq.lhs, eq.rhs}))));
    }
  }
}

TEST_CASE("grounding oracle sanity") {
  GroundingOracle oracle(4);
  CHECK_FALSE(oracle.solve({{t("X"), t("f(X)")}}).has_value());
  CHECK_FALSE(oracle.exhausted());
  const auto sol = GroundingOracle(4).solve({{t("g(X, a)"), t("g(f(Y), Y)")}});
  REQUIRE(sol.has_value());
  CHECK(sol->at("X") == "f(a)");
}

TEST_CASE("matchability") {
  const ColourSet c = ColourSet::of({"c"});
  CHECK(matchable(t("+c(X)"), t("-c(0)"), c));
  CHECK_FALSE(matchable(t("+c(X)"), t("f(Y)"), c));
  CHECK_FALSE(matchable(t("+c(f(X))"), t("-c(g(Y))"), c));
  CHECK_FALSE(matchable(t("+c(X)"), t("+c(X)"), c));
  CHECK_FALSE(matchable(t("+c(X)"), t("-c(X)"), ColourSet::of({"d"})));
  // The right ray is renamed apart: X and f(X) unify across two stars.
  CHECK(matchable(t("+c(X)"), t("-c(f(X))"), c));
}

TEST_CASE("binary resolution") {
  const ResolveResult r = resolve({t("+a(X)"), t("g(X)")}, {t("-a(f(Y))"), t("+c(Y)")}, 0, 0);
  REQUIRE(r.ok());
  REQUIRE(r.clause().size() == 2);
  CHECK(alpha_equivalent(Star{r.clause()[0], r.clause()[1]}, Star{t("g(f(Y))"), t("+c(Y)")}));

  const ResolveResult empty = resolve({t("+p(X)")}, {t("-p(X)")}, 0, 0);
  REQUIRE(empty.ok());
  CHECK(empty.clause().empty());

  CHECK_FALSE(resolve({t("+p(f(X))")}, {t("-p(g(Y))")}, 0, 0).ok());
  CHECK_THROWS_AS(resolve({t("+p(X)")}, {t("+p(X)")}, 0, 0), std::invalid_argument);
}
