#include <cmath>
#include <string>

#include "gchs/derivatives.hpp"
#include "gchs/errors.hpp"
#include "gchs/parser.hpp"
#include "gchs/random.hpp"
#include "gchs/testing/finite_difference.hpp"
#include "test_helpers.hpp"

using namespace gchs;
using gchs::test::point;

namespace {

ParseError::Kind parse_kind(const std::string& text, std::size_t n) {
  try {
    parse_field(text, n);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for '" << text << "'");
  return ParseError::Kind::syntax;
}

std::size_t parse_column(const std::string& text, std::size_t n) {
  try {
    parse_field(text, n);
  } catch (const ParseError& e) {
    return e.column();
  }
  FAIL("expected a parse error for '" << text << "'");
  return 0;
}

}  // namespace

TEST_CASE("parse and evaluate the oscillator Hamiltonian") {
  const Field h = parse_field("(q1^2 + p1^2)/2", 1);
  CHECK(h(point(1, 2)) == Complex(2.5, 0));
  CHECK(h.dimension() == 1);
}

TEST_CASE("evaluation of coordinate and transcendental fields") {
  CHECK(parse_field("z1", 1)(point(1, 2)) == Complex(1, 2));
  CHECK(parse_field("conj(z1)", 1)(point(1, 2)) == Complex(1, -2));
  CHECK(parse_field("exp(q1)", 1)(point(0, 0)) == Complex(1, 0));
  CHECK(parse_field("i", 1)(point(0, 0)) == Complex(0, 1));
  CHECK(parse_field("q2*p1 - 3", 2)(PhasePoint({1, 4}, {5, 6})) == Complex(17, 0));
  CHECK_NEAR(parse_field("sin(q1)^2 + cos(q1)^2", 1)(point(0.7, 0)), Complex(1, 0), 1e-15);
  CHECK_NEAR(parse_field("log(exp(p1))", 1)(point(0, 1.25)), Complex(1.25, 0), 1e-15);
  CHECK_NEAR(parse_field("1.5e-1*q1^-2", 1)(point(2, 0)), Complex(0.0375, 0), 1e-16);
}

TEST_CASE("z times its conjugate equals q^2 + p^2") {
  Rng rng(3);
  const Field lhs = parse_field("z1*conj(z1)", 1);
  const Field rhs = parse_field("q1^2 + p1^2", 1);
  const Field im = parse_field("i*(z1 - conj(z1))", 1);
  for (int k = 0; k < 100; ++k) {
    const auto pt = random_point(1, rng, 3.0);
    CHECK_NEAR(lhs(pt), rhs(pt), 1e-13);
    CHECK_NEAR(im(pt), Complex(-2 * pt.p(0), 0), 1e-14);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(parse_field("log(q1)", 1)(point(0, 1)), DomainError);
  CHECK_THROWS_AS(parse_field("1/q1", 1)(point(0, 1)), DomainError);
  CHECK_THROWS_AS(parse_field("q1^-1", 1)(point(0, 1)), DomainError);
  CHECK_THROWS_AS(parse_field("exp(exp(q1))", 1)(point(10, 0)), DomainError);
}

TEST_CASE("parse error kinds") {
  CHECK(parse_kind("q0", 1) == ParseError::Kind::index_out_of_range);
  CHECK(parse_kind("q3", 2) == ParseError::Kind::index_out_of_range);
  CHECK(parse_kind("z2", 1) == ParseError::Kind::index_out_of_range);
  CHECK(parse_kind("x1", 1) == ParseError::Kind::unknown_identifier);
  CHECK(parse_kind("tan(q1)", 1) == ParseError::Kind::unknown_identifier);
  CHECK(parse_kind("t", 1) == ParseError::Kind::unknown_identifier);
  CHECK(parse_kind("q1 +", 1) == ParseError::Kind::syntax);
  CHECK(parse_kind("q1^2.5", 1) == ParseError::Kind::syntax);
  CHECK(parse_kind("(q1", 1) == ParseError::Kind::syntax);
  CHECK(parse_kind("", 1) == ParseError::Kind::syntax);
  CHECK(parse_kind("q1 q1", 1) == ParseError::Kind::syntax);
}

TEST_CASE("parse errors report 1-based columns") {
  CHECK(parse_column("q1 + q7", 2) == 6);
  CHECK(parse_column("q1 + ", 1) == 6);
  CHECK(parse_column("@", 1) == 1);
  try {
    parse_field("q1 + q7", 2);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column 6") != std::string::npos);
  }
}

TEST_CASE("time is accepted only when enabled") {
  const Field f = parse_field("sin(t) + q1", 1, ParseOptions{.allow_time = true});
  CHECK(f.depends_on_time());
  CHECK_NEAR(f(point(1, 0), 0.5), Complex(std::sin(0.5) + 1, 0), 1e-15);
  CHECK_FALSE(parse_field("q1", 1).depends_on_time());
}

TEST_CASE("combining fields of different dimensions is rejected") {
  CHECK_THROWS_AS(Field::q(1, 0) + Field::q(2, 0), std::invalid_argument);
  CHECK((Field(2.0) + Field::q(2, 1)).dimension() == 2);
}

TEST_CASE("printed fields parse back to the same function") {
  Rng rng(19);
  for (int k = 0; k < 200; ++k) {
    const Field f = random_smooth_field(2, rng);
    const Field g = parse_field(f.to_string(), 2);
    for (int m = 0; m < 5; ++m) {
      const auto pt = random_point(2, rng);
      const Complex a = f(pt);
      CHECK_NEAR(g(pt), a, 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
  CHECK(parse_field("-(q1 - 2)*3", 1).to_string() == "-(q1 - 2)*3");
}

TEST_CASE("field algebra: linearity and conjugation of values") {
  Rng rng(23);
  for (int k = 0; k < 200; ++k) {
    const Field f = random_complex_polynomial(2, rng);
    const Field g = random_complex_polynomial(2, rng);
    const auto pt = random_point(2, rng);
    const Complex a(0.3, -1.7);
    CHECK_NEAR((a * f + g)(pt), a * f(pt) + g(pt), 1e-12 * std::max(1.0, std::abs(f(pt)) + std::abs(g(pt))));
    CHECK_NEAR(conj(f)(pt), std::conj(f(pt)), 1e-12 * std::max(1.0, std::abs(f(pt))));
  }
}

TEST_CASE("Wirtinger gradients of basic fields") {
  const auto n = 1;
  SECTION("z") {
    const auto g = gradient(Field::z(n, 0), point(1, 2));
    CHECK(g.dz[0] == Complex(1, 0));
    CHECK(g.dzbar[0] == Complex(0, 0));
  }
  SECTION("zbar") {
    const auto g = gradient(Field::zbar(n, 0), point(1, 2));
    CHECK(g.dz[0] == Complex(0, 0));
    CHECK(g.dzbar[0] == Complex(1, 0));
  }
  SECTION("H = z zbar / 2 has dH/dz = zbar/2") {
    const auto g = gradient(parse_field("(q1^2 + p1^2)/2", 1), point(1, 2));
    CHECK_NEAR(g.dz[0], Complex(0.5, -1), 1e-15);
    CHECK_NEAR(g.dzbar[0], Complex(0.5, 1), 1e-15);
  }
}

TEST_CASE("dual-number partials agree with central differences") {
  Rng rng(29);
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    const Field f = random_smooth_field(2, rng);
    const auto pt = random_point(2, rng);
    const auto ad = real_jet(f, pt).partials;
    const auto fd = gchs::testing::central_gradient(f, pt);
    for (std::size_t a = 0; a < ad.size(); ++a)
      worst = std::max(worst, std::abs(ad[a] - fd[a]) / std::max(1.0, std::abs(ad[a])));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("second derivatives") {
  SECTION("oscillator Hamiltonian has identity Hessian") {
    const auto hess = second_derivatives(parse_field("(q1^2 + p1^2)/2", 1), point(0.3, -0.8));
    CHECK_NEAR(hess(0, 0), Complex(1, 0), 1e-15);
    CHECK_NEAR(hess(1, 1), Complex(1, 0), 1e-15);
    CHECK_NEAR(hess(0, 1), Complex(0, 0), 1e-15);
  }
  SECTION("q p has a unit mixed partial") {
    const auto hess = second_derivatives(parse_field("q1*p1", 1), point(2, 5));
    CHECK(hess(0, 1) == Complex(1, 0));
    CHECK(hess(0, 0) == Complex(0, 0));
  }
  SECTION("agreement with finite differences") {
    Rng rng(31);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Field f = random_smooth_field(2, rng);
      const auto pt = random_point(2, rng);
      const auto hess = second_derivatives(f, pt);
      const auto fd = gchs::testing::central_hessian(f, pt);
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          worst = std::max(worst, std::abs(hess(a, b) - fd[a * 4 + b]) / std::max(1.0, std::abs(hess(a, b))));
    }
    CHECK(worst < 1e-5);
  }
}
