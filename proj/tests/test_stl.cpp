#include <doctest.h>

#include <cmath>
#include <random>

#include "falsify/stl.hpp"
#include "support/random_stl.hpp"
#include "support/stl_oracle.hpp"

using namespace falsify;
using namespace falsify::stl;

namespace {

Expr sub(Expr a, Expr b) { return Expr::binary(Expr::Op::Sub, std::move(a), std::move(b)); }

bool same(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-9;
}

}  // namespace

TEST_CASE("parse desugars derived operators") {
  const Formula s1 = parse("[](speed < 120)");
  const Formula expected =
      always(TimeInterval{}, negation(atom(sub(Expr::var("speed"), Expr::constant(120)))));
  CHECK(s1 == expected);

  const Formula s1b = parse("[][0,30](speed < 120)");
  CHECK(s1b == always({0, 30}, negation(atom(sub(Expr::var("speed"), Expr::constant(120))))));

  const Formula s3 = parse("<>[10,30](speed > 57 || speed < 53)");
  REQUIRE(s3.kind == Formula::Kind::Until);
  CHECK(s3.interval == TimeInterval(10, 30));
  CHECK(s3.children[0] == truth());
  CHECK(s3.children[1] == disj(atom(sub(Expr::var("speed"), Expr::constant(57))),
                               negation(atom(sub(Expr::var("speed"), Expr::constant(53))))));
}

TEST_CASE("parse operator precedence") {
  CHECK(parse("a > 0 && b > 0 || c > 0") ==
        disj(conj(atom(Expr::var("a")), atom(Expr::var("b"))), atom(Expr::var("c"))));
  CHECK(parse("a > 0 U[0,2] b > 0 U c > 0") ==
        until({}, until({0, 2}, atom(Expr::var("a")), atom(Expr::var("b"))),
              atom(Expr::var("c"))));
  CHECK(parse("a > 0 -> b > 0") == implies(atom(Expr::var("a")), atom(Expr::var("b"))));
  CHECK(parse("(a + b) * 2 >= -3") ==
        atom(sub(Expr::binary(Expr::Op::Mul,
                              Expr::binary(Expr::Op::Add, Expr::var("a"), Expr::var("b")),
                              Expr::constant(2)),
                 Expr::constant(-3))));
  CHECK(parse("((a > 0))") == atom(Expr::var("a")));
  CHECK(parse("abs(x - 1) <= max(y, 2)") ==
        negation(atom(sub(Expr::unary(Expr::Op::Abs, sub(Expr::var("x"), Expr::constant(1))),
                          Expr::binary(Expr::Op::Max, Expr::var("y"), Expr::constant(2))))));
  CHECK(parse("<>[1,inf] true") == eventually({1, kInf}, truth()));
}

TEST_CASE("parse errors carry a position") {
  try {
    (void)parse("[][2,2](x > 0)");
    FAIL("singular interval accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 3);
  }
  try {
    (void)parse("x > 0 &&\n  (y == 1)");
    FAIL("== accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("[][3,1](x > 0)"), ParseError);
  CHECK_THROWS_AS(parse("x >"), ParseError);
  CHECK_THROWS_AS(parse("(x > 0"), ParseError);
  CHECK_THROWS_AS(parse("x > 0 y"), ParseError);
  CHECK_THROWS_AS(parse("x $ 0"), ParseError);
  CHECK_THROWS_AS(TimeInterval(1, 1), std::invalid_argument);
}

TEST_CASE("print then parse is the identity on random formulas") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const Formula f = testing::random_formula(rng, 3);
    const std::string text = to_string(f);
    INFO(text);
    CHECK(parse(text) == f);
  }
  const Formula odd = atom(Expr::binary(
      Expr::Op::Add, Expr::unary(Expr::Op::Neg, Expr::constant(3)), Expr::constant(0.1)));
  CHECK(parse(to_string(odd)) == odd);
}

TEST_CASE("robustness of basic formulas") {
  const Signal w({"x"}, 0.5, {-1, -0.5, 0, 0.5, 1});
  CHECK(robustness(w, falsum()) == -kInf);
  CHECK(robustness(w, truth()) == kInf);
  CHECK(robustness(Signal({"x"}, 1.0, {3, 3}), parse("x > 0")) == 3);
  CHECK(robustness(w, parse("<>[0,2](x > 0)")) == 1);
  CHECK(robustness(w, parse("[][0,2](x > 0)")) == -1);
  CHECK(robustness(w, parse("<>[0.2,0.7](x > 0)")) == -0.5);
  // interval beyond the horizon leaves the sup empty
  CHECK(robustness(w, parse("<>[3,4](x > 0)")) == -kInf);
  CHECK_THROWS_AS(robustness(w, parse("y > 0")), EvaluationError);
}

TEST_CASE("until excludes the right endpoint of the left operand's range") {
  // x holds on [0, 1), y becomes true at t = 1
  const Signal w = Signal::from_rows({"x", "y"}, 1.0, {{1, -1}, {-5, 2}});
  CHECK(robustness(w, parse("x > 0 U[0,1] y > 0")) == 1);
  CHECK(boolean_sat(w, parse("x > 0 U[0,1] y > 0")));
  // at t = 0 the left range is empty, so only y(0) matters
  CHECK(robustness(w, parse("x > 0 U[0,0.5] y > 0")) == -1);
}

TEST_CASE("recursive evaluator matches the brute-force oracle") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const Formula f = testing::random_formula(rng, 3);
    const Signal w = testing::random_signal(rng, 12);
    testing::RobustnessOracle oracle(w);
    const double expected = oracle.rho(f);
    INFO(to_string(f));
    CHECK(same(robustness(w, f), expected));
    CHECK(same(serial::robustness(w, f), expected));
  }
}

TEST_CASE("parallel and serial traces agree on long signals") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d;
  std::vector<double> v(2 * 600);
  for (double& x : v) x = d(rng);
  const Signal w({"x", "y"}, 0.05, v);
  for (int i = 0; i < 20; ++i) {
    const Formula f = testing::random_formula(rng, 3);
    CHECK(robustness_trace(w, f) == serial::robustness_trace(w, f));
  }
}

TEST_CASE("semantic identities") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Formula a = testing::random_formula(rng, 2);
    const Formula b = testing::random_formula(rng, 2);
    const Signal w = testing::random_signal(rng, 16);
    // De Morgan
    CHECK(robustness(w, negation(conj(a, b))) ==
          std::max(robustness(w, negation(a)), robustness(w, negation(b))));
    // negation is exact
    CHECK(robustness(w, a) == -robustness(w, negation(a)));
    // widening the interval of eventually never lowers robustness
    const TimeInterval narrow = testing::random_interval(rng);
    const TimeInterval wide(std::max(0.0, narrow.lo - 0.5), narrow.hi + 1.0);
    CHECK(robustness(w, eventually(wide, a)) >= robustness(w, eventually(narrow, a)));
  }
}

TEST_CASE("boolean satisfaction agrees with the robustness sign and the oracle") {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 1000; ++i) {
    const Formula f = testing::random_formula(rng, 3);
    const Signal w = testing::random_signal(rng, 14);
    const double r = robustness(w, f);
    const bool s = boolean_sat(w, f);
    testing::RobustnessOracle oracle(w);
    CHECK(s == oracle.sat(f));
    if (std::abs(r) > 1e-9) CHECK(s == (r > 0));
  }
  CHECK(boolean_sat(Signal({"x"}, 1.0, {0}), truth()));
}

TEST_CASE("variables lists every referenced name") {
  const auto vars = variables(parse("[](a > b + c) U <>(abs(d) < 1)"));
  CHECK(vars == std::set<std::string>{"a", "b", "c", "d"});
  CHECK(depth(parse("x > 0")) == 0);
}
