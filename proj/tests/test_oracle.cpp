#include <catch2/catch_amalgamated.hpp>

#include "partab/gen.hpp"
#include "partab/oracle.hpp"
#include "partab/parse.hpp"
#include "partab/tableau.hpp"

using namespace partab;

TEST_CASE("decide_reference: basic verdicts") {
  CHECK(decide_reference(parse("p")) == Outcome::Satisfiable);
  CHECK(decide_reference(parse("p & ~p")) == Outcome::Unsatisfiable);
  CHECK(decide_reference(parse("Gp & F~p")) == Outcome::Unsatisfiable);
  CHECK(decide_reference(parse("GFp & GF~p")) == Outcome::Satisfiable);
  CHECK(decide_reference(parse("p U q")) == Outcome::Satisfiable);
  CHECK(decide_reference(parse("G(Fq) & G~q")) == Outcome::Unsatisfiable);
  CHECK(decide_reference(parse("Xp & X~p")) == Outcome::Unsatisfiable);
}

TEST_CASE("decide_reference: invariant under negation normal form") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Formula f = gen({1 + (seed % 12), seed * 5 + 2, {"p", "q"}});
    try {
      REQUIRE(decide_reference(f) == decide_reference(to_nnf(f)));
    } catch (const OracleBoundExceeded&) {
    }
  }
}

TEST_CASE("decide_reference: excluded middle instances are satisfiable") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    Formula phi = gen({1 + (seed % 7), seed, {"p", "q"}});
    Formula em = Formula::disj(phi, Formula::negation(phi));
    try {
      CAPTURE(render(phi));
      REQUIRE(decide_reference(em) == Outcome::Satisfiable);
    } catch (const OracleBoundExceeded&) {
    }
  }
}

TEST_CASE("decide_reference: bound errors on oversized closures") {
  // A long until-chain exceeds the default 40-formula closure bound.
  Formula f = gen({60, 9, {"p", "q"}});
  CHECK_THROWS_AS(decide_reference(f, {10, 13}), OracleBoundExceeded);
}

TEST_CASE("decide_reference: agreement with the tableau engine") {
  int checked = 0;
  for (std::uint64_t seed = 500; seed < 700; ++seed) {
    Formula f = gen({1 + (seed % 15), seed, {"p", "q"}});
    Outcome engine;
    try {
      EngineOptions options;
      options.budget.max_vertices = 1000000;
      engine = solve(f, options).outcome;
    } catch (const BudgetExceeded&) {
      continue;
    }
    try {
      CAPTURE(seed, render(f));
      REQUIRE(decide_reference(f, {100, 16}) == engine);
      ++checked;
    } catch (const OracleBoundExceeded&) {
    }
  }
  CHECK(checked >= 190);
}
