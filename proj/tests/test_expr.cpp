#include <doctest.h>

#include <cmath>
#include <random>

#include "lvhybrid/expr.hpp"

using namespace lvh;

TEST_CASE("expr: precedence and associativity") {
  CHECK(eval(parse("2 + 3*4", 1), {}) == 14.0);
  CHECK(eval(parse("2^3^2", 1), {}) == 512.0);
  CHECK(eval(parse("2 - 3 - 4", 1), {}) == -5.0);
  CHECK(eval(parse("12 / 4 / 3", 1), {}) == 1.0);
  CHECK(eval(parse("(-2)^2", 1), {}) == 4.0);
  CHECK(eval(parse("2*3 + 4*5", 1), {}) == 26.0);
}

TEST_CASE("expr: variables, functions, constants") {
  Profile p = parse("min(x, 1 - x)", 1);
  CHECK(eval(p, {0.25, 0.0}) == 0.25);
  CHECK(eval(p, {0.75, 0.0}) == 0.25);
  CHECK(eval(parse("cos(pi*x)", 1), {1.0, 0.0}) == doctest::Approx(-1.0));
  CHECK(eval(parse("e", 1), {}) == doctest::Approx(std::exp(1.0)));
  CHECK(eval(parse("tanh(0.5) + abs(0 - 2)", 1), {}) ==
        doctest::Approx(std::tanh(0.5) + 2.0));
  CHECK(eval(parse("max(x, y)", 2), {0.3, 0.8}) == 0.8);
  CHECK(eval(parse("x + y^2", 2), {1.0, 2.0}) == doctest::Approx(5.0));
  CHECK(eval(parse("exp(sin(0))", 1), {}) == doctest::Approx(1.0));
}

TEST_CASE("expr: syntax errors carry the offset") {
  CHECK_THROWS_AS(parse("2 + * 3", 1), SyntaxError);
  try {
    parse("2 + * 3", 1);
  } catch (const SyntaxError& e) {
    CHECK(e.offset == 4);
    CHECK(!e.expected.empty());
  }
  CHECK_THROWS_AS(parse("(x", 1), SyntaxError);
  CHECK_THROWS_AS(parse("", 1), SyntaxError);
  CHECK_THROWS_AS(parse("min(x)", 1), SyntaxError);
}

TEST_CASE("expr: unknown identifiers and dimension guards") {
  try {
    parse("2 + foo", 1);
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name == "foo");
    CHECK(e.offset == 4);
  }
  try {
    parse("y", 1);
    FAIL("expected WrongDimension");
  } catch (const WrongDimension& e) {
    CHECK(e.name == "y");
    CHECK(e.dimension == 1);
  }
  CHECK_NOTHROW(parse("y", 2));
}

TEST_CASE("expr: domain errors instead of non-finite values") {
  CHECK_THROWS_AS(eval(parse("1 / x", 1), {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(eval(parse("x ^ 0.5", 1), {-1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(eval(parse("exp(1000)", 1), {}), DomainError);
  CHECK(eval(parse("x ^ 0.5", 1), {4.0, 0.0}) == 2.0);
}

TEST_CASE("expr: to_string reparses to the same values") {
  const char* sources[] = {
      "1 + 0.5*cos(pi*x)",
      "min(x, 1 - x) * max(0.2, x^2)",
      "-(x - 0.5)^2 + tanh(3*x)",
      "0.5 + cos(2*pi*x) / (1 + x)",
  };
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const char* src : sources) {
    Profile p = parse(src, 1);
    Profile q = parse(p.expr.to_string(), 1);
    for (int i = 0; i < 64; ++i) {
      Point at{unit(rng), 0.0};
      CHECK(eval(p, at) == eval(q, at));
    }
  }
}
