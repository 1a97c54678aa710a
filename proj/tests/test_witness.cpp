#include <catch2/catch_amalgamated.hpp>

#include "partab/lasso.hpp"
#include "partab/parse.hpp"

using namespace partab;

namespace {
LassoModel lasso(std::vector<LassoModel::State> prefix, std::vector<LassoModel::State> loop) {
  return LassoModel{std::move(prefix), std::move(loop)};
}
}  // namespace

TEST_CASE("check_witness: basic temporal operators") {
  CHECK(check_witness(parse("Fp"), lasso({}, {{"p"}})));
  CHECK_FALSE(check_witness(parse("Gp"), lasso({{"p"}}, {{}})));
  CHECK(check_witness(parse("p U q"), lasso({{"p"}, {"p"}}, {{"q"}})));
  CHECK_FALSE(check_witness(parse("p U q"), lasso({{"p"}}, {{"p"}})));
  CHECK(check_witness(parse("Gp"), lasso({}, {{"p"}})));
  CHECK(check_witness(parse("XXq"), lasso({{}, {}}, {{"q"}})));
  CHECK_FALSE(check_witness(parse("XXq"), lasso({{}, {"q"}}, {{}})));
}

TEST_CASE("check_witness: evaluation wraps through the loop") {
  // At the last loop position, X refers back to the loop start.
  CHECK(check_witness(parse("G(p | q)"), lasso({}, {{"p"}, {"q"}})));
  CHECK(check_witness(parse("GFp"), lasso({}, {{}, {"p"}})));
  CHECK_FALSE(check_witness(parse("GFp"), lasso({{"p"}}, {{}})));
  CHECK(check_witness(parse("FGq"), lasso({{"p"}}, {{"q"}})));
}

TEST_CASE("check_witness: negation and release") {
  CHECK(check_witness(parse("~Fq"), lasso({}, {{"p"}})));
  Formula rel = Formula::release(parse("p"), parse("q"));
  CHECK(check_witness(rel, lasso({}, {{"q"}})));            // q forever
  CHECK(check_witness(rel, lasso({{"q"}, {"p", "q"}}, {{}})));  // released by p
  CHECK_FALSE(check_witness(rel, lasso({{"q"}}, {{}})));
}

TEST_CASE("check_witness: empty loop is not a lasso") {
  CHECK_FALSE(check_witness(parse("p"), LassoModel{{{"p"}}, {}}));
}

TEST_CASE("check_witness: until semantics demand the cure on the lasso") {
  // p U q with p on the loop but q nowhere: false.
  CHECK_FALSE(check_witness(parse("p U q"), lasso({}, {{"p"}})));
  // q at the loop's second state: the obligation is met after one step.
  CHECK(check_witness(parse("p U q"), lasso({}, {{"p"}, {"q"}})));
}

TEST_CASE("render_witness: two-line format with brace states") {
  LassoModel m = lasso({{"p", "q"}, {"p"}}, {{"q"}, {}});
  CHECK(render_witness(m) == "prefix: {p,q};{p}\nloop: {q};{}\n");
  LassoModel empty_prefix = lasso({}, {{"p"}});
  CHECK(render_witness(empty_prefix) == "prefix: \nloop: {p}\n");
}
