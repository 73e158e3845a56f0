#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "genfrac/expr.hpp"

using genfrac::Expression;

TEST_CASE("arithmetic and precedence") {
    auto e = Expression::parse("2 + 3*4 - 6/3", {});
    CHECK(e.eval({}) == doctest::Approx(12.0));
    auto pw = Expression::parse("2^3^2", {});  // right associative
    CHECK(pw.eval({}) == doctest::Approx(512.0));
    auto neg = Expression::parse("-2^2", {});
    CHECK(neg.eval({}) == doctest::Approx(-4.0));
    auto paren = Expression::parse("(2+3)*(4-1)", {});
    CHECK(paren.eval({}) == doctest::Approx(15.0));
}

TEST_CASE("variables and functions") {
    auto e = Expression::parse("exp(alpha*s) + sin(s) - cos(s)", {"s", "alpha"});
    const std::array<double, 2> env{0.7, 0.5};
    CHECK(e.eval(env) ==
          doctest::Approx(std::exp(0.35) + std::sin(0.7) - std::cos(0.7)).epsilon(1e-14));

    auto g = Expression::parse("gamma(x)", {"x"});
    const std::array<double, 1> half{0.5};
    CHECK(g.eval(half) == doctest::Approx(std::sqrt(3.14159265358979323846)).epsilon(1e-12));

    auto p = Expression::parse("pow(s, 0.5) - sqrt(s)", {"s"});
    const std::array<double, 1> four{4.0};
    CHECK(p.eval(four) == doctest::Approx(0.0));

    auto c = Expression::parse("pi", {});
    CHECK(c.eval({}) == doctest::Approx(3.14159265358979323846));
}

TEST_CASE("parse failures carry the variable list") {
    CHECK_THROWS_AS(Expression::parse("t + bogus", {"t"}), genfrac::SchemaError);
    CHECK_THROWS_AS(Expression::parse("sin(t", {"t"}), genfrac::SchemaError);
    CHECK_THROWS_AS(Expression::parse("frob(t)", {"t"}), genfrac::SchemaError);
    CHECK_THROWS_AS(Expression::parse("1 + ", {}), genfrac::SchemaError);
    CHECK_THROWS_AS(Expression::parse("2 3", {}), genfrac::SchemaError);
}

TEST_CASE("scientific notation") {
    auto e = Expression::parse("1.5e-3 + 2E2", {});
    CHECK(e.eval({}) == doctest::Approx(200.0015));
}
