#include <catch2/catch_amalgamated.hpp>

#include "partab/formula.hpp"
#include "partab/gen.hpp"
#include "partab/oracle.hpp"
#include "partab/parse.hpp"

using namespace partab;

TEST_CASE("parse: single atom") {
  Formula f = parse("p");
  CHECK(f.kind() == Formula::Kind::Atom);
  CHECK(f.name() == "p");
}

TEST_CASE("parse: sample input under the precedence contract") {
  // Xp&~Xp|XXq reads as (Xp & ~Xp) | XXq.
  Formula f = parse("Xp&~Xp|XXq");
  REQUIRE(f.kind() == Formula::Kind::Or);
  Formula lhs = f.left();
  REQUIRE(lhs.kind() == Formula::Kind::And);
  CHECK(lhs.left() == Formula::next(Formula::atom("p")));
  CHECK(lhs.right() == Formula::negation(Formula::next(Formula::atom("p"))));
  CHECK(f.right() == Formula::next(Formula::next(Formula::atom("q"))));
}

TEST_CASE("parse: U is right-associative and binds tighter than &") {
  Formula f = parse("p U q U r");
  REQUIRE(f.kind() == Formula::Kind::Until);
  CHECK(f.left() == Formula::atom("p"));
  CHECK(f.right() == Formula::until(Formula::atom("q"), Formula::atom("r")));

  Formula g = parse("a U b & c");
  CHECK(g.kind() == Formula::Kind::And);
  CHECK(g.left() == Formula::until(Formula::atom("a"), Formula::atom("b")));
}

TEST_CASE("parse: & and | are left-associative") {
  CHECK(parse("a & b & c") ==
        Formula::conj(Formula::conj(Formula::atom("a"), Formula::atom("b")), Formula::atom("c")));
  CHECK(parse("a | b | c") ==
        Formula::disj(Formula::disj(Formula::atom("a"), Formula::atom("b")), Formula::atom("c")));
}

TEST_CASE("parse: errors carry a position") {
  try {
    parse("(");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 1);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("   "), ParseError);
  CHECK_THROWS_AS(parse("p &"), ParseError);
  CHECK_THROWS_AS(parse("p q"), ParseError);
  CHECK_THROWS_AS(parse("(p | q"), ParseError);
}

TEST_CASE("parse: identifiers may not contain operator letters") {
  Formula f = parse("pUq");
  CHECK(f.kind() == Formula::Kind::Until);
  Formula g = parse("foo_1 & bar2");
  CHECK(g.left().name() == "foo_1");
  CHECK(g.right().name() == "bar2");
}

TEST_CASE("render: examples") {
  CHECK(render(Formula::atom("p")) == "p");
  CHECK(render(parse("Xp&~Xp|XXq")) == "Xp & ~Xp | XXq");
  CHECK(render(parse("p U q U r")) == "p U q U r");
  // Right-nested & and left-nested U need the parentheses.
  CHECK(render(Formula::conj(Formula::atom("a"), Formula::conj(Formula::atom("b"),
                                                               Formula::atom("c")))) ==
        "a & (b & c)");
  CHECK(render(Formula::until(Formula::until(Formula::atom("p"), Formula::atom("q")),
                              Formula::atom("r"))) == "(p U q) U r");
  CHECK(render(parse("X(p & q)")) == "X(p & q)");
}

TEST_CASE("to_nnf: dualities") {
  CHECK(to_nnf(parse("~Fp")) == parse("G~p"));
  CHECK(to_nnf(parse("~Gp")) == parse("F~p"));
  CHECK(to_nnf(parse("~(p U q)")) ==
        Formula::release(Formula::negation(Formula::atom("p")),
                         Formula::negation(Formula::atom("q"))));
  CHECK(to_nnf(parse("~~p")) == parse("p"));
  CHECK(to_nnf(parse("~Xp")) == parse("X~p"));
  CHECK(to_nnf(parse("~(p & q)")) == parse("~p | ~q"));
  CHECK(to_nnf(parse("~(p | q)")) == parse("~p & ~q"));
  // Negated Release flips back to Until.
  Formula r = Formula::negation(Formula::release(Formula::atom("p"), Formula::atom("q")));
  CHECK(to_nnf(r) == parse("~p U ~q"));
}

TEST_CASE("length: node counts") {
  CHECK(parse("p").length() == 1);
  CHECK(parse("Xp").length() == 2);
  CHECK(parse("p & q").length() == 3);
  CHECK(parse("~(p U q)").length() == 4);
}

TEST_CASE("property: parse(render(f)) round-trips generated formulas") {
  for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
    GenConfig cfg;
    cfg.length = 1 + (seed % 40);
    cfg.seed = seed;
    Formula f = gen(cfg);
    Formula back = parse(render(f));
    if (!(back == f)) {
      CAPTURE(seed, render(f));
      REQUIRE(back == f);
    }
  }
  SUCCEED();
}

TEST_CASE("property: NNF idempotence and size bound") {
  for (std::uint64_t seed = 1; seed <= 5000; ++seed) {
    GenConfig cfg;
    cfg.length = 1 + (seed % 30);
    cfg.seed = seed * 3 + 1;
    Formula f = gen(cfg);
    Formula nnf = to_nnf(f);
    REQUIRE(is_nnf(nnf));
    REQUIRE(to_nnf(nnf) == nnf);
    REQUIRE(nnf.length() <= 2 * f.length());
  }
}

TEST_CASE("property: NNF preserves the oracle verdict") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    GenConfig cfg;
    cfg.length = 1 + (seed % 15);
    cfg.seed = seed;
    Formula f = gen(cfg);
    try {
      Outcome direct = decide_reference(f);
      Outcome via_nnf = decide_reference(to_nnf(f));
      REQUIRE(direct == via_nnf);
      ++checked;
    } catch (const OracleBoundExceeded&) {
    }
  }
  CHECK(checked >= 250);
}

TEST_CASE("canonical order is a strict total order on distinct formulas") {
  std::vector<Formula> sample;
  for (std::uint64_t seed = 1; seed <= 60; ++seed)
    sample.push_back(gen({1 + (seed % 12), seed, {"p", "q"}}));
  for (const auto& a : sample)
    for (const auto& b : sample) {
      int ab = a.compare(b);
      int ba = b.compare(a);
      REQUIRE(((ab == 0 && ba == 0) || (ab < 0 && ba > 0) || (ab > 0 && ba < 0)));
      REQUIRE((ab == 0) == (a == b));
    }
}
