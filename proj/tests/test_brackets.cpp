#include <cmath>
#include <string>

#include "gchs/brackets.hpp"
#include "gchs/dynamics.hpp"
#include "gchs/parser.hpp"
#include "gchs/random.hpp"
#include "test_helpers.hpp"

using namespace gchs;
using gchs::test::point;

namespace {

const Field kOscillator = parse_field("(q1^2 + p1^2)/2", 1);

StructuredSystem system1(const std::string& s) { return StructuredSystem(1, kOscillator, parse_field(s, 1)); }

}  // namespace

TEST_CASE("real Poisson bracket of coordinates and the oscillator") {
  const auto pt = point(1, 2);
  const Field q = Field::q(1, 0), p = Field::p(1, 0);
  CHECK(pb_real(q, p, pt) == Complex(1, 0));
  CHECK(pb_real(p, q, pt) == Complex(-1, 0));
  CHECK(pb_real(kOscillator, kOscillator, pt) == Complex(0, 0));
  CHECK(pb_real(q, kOscillator, pt) == Complex(2, 0));
}

TEST_CASE("complex Poisson bracket") {
  const auto pt = point(1, 2);
  const Field z = Field::z(1, 0), zb = Field::zbar(1, 0);
  CHECK(pb_complex(z, zb, pt) == Complex(0, -2));
  CHECK(pb_complex(z, z, pt) == Complex(0, 0));
  CHECK(pb_complex(Field::q(1, 0), kOscillator, pt) == Complex(2, 0));
}

TEST_CASE("structural derivatives") {
  const auto pt = point(1, 2);
  SECTION("s = q, f = 1 gives ds/dz") {
    const auto d = structural_derivative(Field(1.0), system1("q1"), pt);
    CHECK(d.dz[0] == Complex(0.5, 0));
    CHECK(d.dzbar[0] == Complex(0.5, 0));
  }
  SECTION("s = q, f = z: 1 + z/2 and z/2") {
    const auto d = structural_derivative(Field::z(1, 0), system1("q1"), pt);
    CHECK_NEAR(d.dz[0], Complex(1.5, 1), 1e-15);
    CHECK_NEAR(d.dzbar[0], Complex(0.5, 1), 1e-15);
  }
  SECTION("constant s reduces to the ordinary gradient") {
    Rng rng(5);
    const auto sys = StructuredSystem(2, random_polynomial(2, rng), Field(3.0));
    for (int k = 0; k < 50; ++k) {
      const Field f = random_complex_polynomial(2, rng);
      const auto x = random_point(2, rng);
      const auto d = structural_derivative(f, sys, x);
      const auto g = gradient(f, x);
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(d.dz[j] == g.dz[j]);
        CHECK(d.dzbar[j] == g.dzbar[j]);
      }
    }
  }
}

TEST_CASE("geobracket") {
  const auto sys = system1("q1");
  const Field z = Field::z(1, 0), zb = Field::zbar(1, 0);
  CHECK_NEAR(geobracket(z, zb, sys, point(1, 2)), Complex(0, -2), 1e-15);
  CHECK_NEAR(geobracket(z, zb, sys, point(3, -1)), Complex(0, -6), 1e-14);
  CHECK(geobracket(z, zb, system1("0"), point(1, 2)) == Complex(0, 0));
  Rng rng(41);
  for (int k = 0; k < 50; ++k) {
    const Field f = random_complex_polynomial(1, rng);
    CHECK(std::abs(geobracket(f, f, sys, random_point(1, rng))) < 1e-12);
  }
}

TEST_CASE("GSPB values") {
  const auto pt = point(1, 2);
  const Field z = Field::z(1, 0), zb = Field::zbar(1, 0);
  CHECK_NEAR(gspb(z, zb, system1("q1"), pt), Complex(0, -4), 1e-14);
  CHECK_NEAR(gspb(z, zb, system1("0"), pt), Complex(0, -2), 1e-15);
  // {1,H} is the S-dynamics {s,H}_PB = H_p for s = q.
  CHECK_NEAR(gspb(Field(1.0), kOscillator, system1("q1"), pt), Complex(2, 0), 1e-15);
}

TEST_CASE("GSPB properties on random fields") {
  Rng rng(43);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
    const auto sys = StructuredSystem(n, random_polynomial(n, rng), random_polynomial(n, rng));
    const Field f = random_complex_polynomial(n, rng);
    const Field g = random_complex_polynomial(n, rng);
    const Field h = random_complex_polynomial(n, rng);
    const auto pt = random_point(n, rng);
    const Complex a(0.7, 0.2), b(-1.1, 0.5);
    const Complex fg = gspb(f, g, sys, pt);
    const double scale = std::max(1.0, std::abs(fg));
    CHECK_NEAR(fg, -gspb(g, f, sys, pt), 1e-12 * scale);
    CHECK(std::abs(gspb(f, f, sys, pt)) < 1e-12 * std::max(1.0, std::abs(f(pt))));
    const Complex lhs = gspb(a * f + b * g, h, sys, pt);
    const Complex rhs = a * gspb(f, h, sys, pt) + b * gspb(g, h, sys, pt);
    CHECK_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
    CHECK_NEAR(fg, pb_complex(f, g, pt) + geobracket(f, g, sys, pt), 1e-10 * scale);
    CHECK_NEAR(fg, gspb_structural_form(f, g, sys, pt), 1e-10 * scale);
  }
}

TEST_CASE("geometrio") {
  const auto gq = geometrio(system1("q1"), point(1, 2));
  CHECK(gq.with_z[0] == Complex(0, 1));
  CHECK(gq.with_zbar[0] == Complex(0, -1));
  const auto gc = geometrio(system1("7"), point(1, 2));
  CHECK(gc.with_z[0] == Complex(0, 0));
  CHECK(gc.with_zbar[0] == Complex(0, 0));
  // ds/dz = -i/2, ds/dzbar = i/2
  const auto gp = geometrio(system1("p1"), point(1, 2));
  CHECK(gp.with_z[0] == Complex(-1, 0));
  CHECK(gp.with_zbar[0] == Complex(-1, 0));
  Rng rng(67);
  for (int k = 0; k < 100; ++k) {
    const auto sys = StructuredSystem(2, random_polynomial(2, rng), random_polynomial(2, rng));
    const auto pt = random_point(2, rng);
    const auto geo = geometrio(sys, pt);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK_NEAR(geo.with_z[j], pb_complex(sys.structural(), Field::z(2, j), pt), 1e-12);
      CHECK_NEAR(geo.with_zbar[j], pb_complex(sys.structural(), Field::zbar(2, j), pt), 1e-12);
    }
  }
}

TEST_CASE("structured system validation") {
  CHECK_THROWS_AS(StructuredSystem(1, kOscillator, parse_field("i*q1", 1)), InputError);
  try {
    StructuredSystem(1, kOscillator, parse_field("z1", 1));
    FAIL("complex s accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("realness") != std::string::npos);
  }
  CHECK_THROWS_AS(StructuredSystem(1, parse_field("q1 + i*p1", 1), Field(0.0)), InputError);
  CHECK_THROWS_AS(StructuredSystem(2, kOscillator, Field(0.0)), InputError);
  CHECK_THROWS_AS(StructuredSystem(0, Field(1.0), Field(0.0)), InputError);
  CHECK_THROWS_AS(StructuredSystem(1, kOscillator, parse_field("t*q1", 1, {.allow_time = true})), InputError);
  // z zbar is real even though its expression mentions i.
  CHECK_NOTHROW(StructuredSystem(1, kOscillator, parse_field("z1*conj(z1)", 1)));
}

TEST_CASE("agrees scales the tolerance by magnitude") {
  CHECK(agrees(1e6, 1e6 + 1e-5, 1e-10));
  CHECK_FALSE(agrees(1.0, 1.0 + 1e-9, 1e-10));
}
