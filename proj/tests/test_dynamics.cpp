#include <cmath>
#include <numbers>
#include <string>

#include "gchs/bridge.hpp"
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

TEST_CASE("TGHS velocity") {
  SECTION("classical oscillator at z = 1 rotates clockwise") {
    const auto v = tghs_velocity(system1("0"), point(1, 0));
    CHECK_NEAR(v.dz[0], Complex(0, -1), 1e-15);
    CHECK_NEAR(v.dzbar[0], Complex(0, 1), 1e-15);
  }
  SECTION("s = q at (1,2)") {
    // qdot = H_p + H s_p = 2, pdot = -(H_q + H s_q) = -3.5
    const auto v = tghs_velocity(system1("q1"), point(1, 2));
    CHECK_NEAR(v.dz[0], Complex(2, -3.5), 1e-15);
    CHECK_NEAR(v.dzbar[0], Complex(2, 3.5), 1e-15);
    const auto real = tghs_real_velocity(system1("q1"), point(1, 2));
    CHECK(real[0] == 2.0);
    CHECK(real[1] == -3.5);
  }
}

TEST_CASE("S-dynamics") {
  CHECK(s_dynamics(system1("q1"), point(1, 2)) == 2.0);
  CHECK(s_dynamics(system1("p1"), point(1, 2)) == -1.0);
  CHECK(s_dynamics(system1("5"), point(1, 2)) == 0.0);
  CHECK(s_dynamics(system1("(q1^2 + p1^2)/2"), point(1, 2)) == 0.0);
}

TEST_CASE("covariant rates at s = q, (1,2)") {
  const auto sys = system1("q1");
  const auto pt = point(1, 2);
  SECTION("f = z") {
    const auto r = gchs_rate(Field::z(1, 0), sys, pt);
    CHECK_NEAR(r.thorough, Complex(2, -3.5), 1e-14);
    CHECK_NEAR(r.total, Complex(4, 0.5), 1e-14);
    CHECK(r.sdyn == 2.0);
  }
  SECTION("f = H: thorough rate -H w, total 0") {
    const auto r = gchs_rate(kOscillator, sys, pt);
    CHECK_NEAR(r.thorough, Complex(-5, 0), 1e-14);
    CHECK_NEAR(r.total, Complex(0, 0), 1e-14);
  }
  SECTION("f = s: total = w (1 + s)") {
    const auto r = gchs_rate(Field::q(1, 0), sys, pt);
    CHECK_NEAR(r.thorough, Complex(2, 0), 1e-14);
    CHECK_NEAR(r.total, Complex(4, 0), 1e-14);
  }
}

TEST_CASE("rate identities on random systems") {
  Rng rng(47);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
    const auto sys = StructuredSystem(n, random_polynomial(n, rng), random_polynomial(n, rng));
    const Field f = random_complex_polynomial(n, rng);
    const auto pt = random_point(n, rng);
    const auto r = gchs_rate(f, sys, pt);
    const double scale = std::max(1.0, std::abs(r.total));
    const Complex bracket = gspb(f, sys.hamiltonian(), sys, pt);
    // Df/dt = {f,H}, split as thorough + f w.
    CHECK_NEAR(r.total, bracket, 1e-10 * scale);
    CHECK_NEAR(r.total, r.thorough + r.value * r.sdyn, 1e-10 * scale);
    // Energy: {H,H} = 0.
    CHECK(std::abs(gspb(sys.hamiltonian(), sys.hamiltonian(), sys, pt)) <
          1e-10 * std::max(1.0, std::abs(sys.hamiltonian()(pt))));
    // dH/dt = -H w.
    const Complex dh = thorough_rate(sys.hamiltonian(), sys, pt);
    CHECK_NEAR(dh, -sys.hamiltonian()(pt) * r.sdyn, 1e-10 * std::max(1.0, std::abs(dh)));
    // w = {1,H}.
    CHECK_NEAR(Complex(r.sdyn), gspb(Field(1.0), sys.hamiltonian(), sys, pt),
               1e-10 * std::max(1.0, std::abs(r.sdyn)));
  }
}

TEST_CASE("equilibrium residual") {
  SECTION("f = H is always in equilibrium") {
    const auto e = equilibrium_residual(kOscillator, system1("q1"), point(1, 2));
    CHECK(std::abs(e.residual) < 1e-14);
  }
  SECTION("classical oscillator, f = z at z = 1") {
    const auto e = equilibrium_residual(Field::z(1, 0), system1("0"), point(1, 0));
    CHECK_NEAR(e.residual, Complex(0, -1), 1e-15);
    CHECK_NEAR(e.flow, Complex(0, 0), 1e-15);
  }
  SECTION("decomposition into classical, structural and flow parts") {
    Rng rng(53);
    for (int k = 0; k < 100; ++k) {
      const auto sys = StructuredSystem(2, random_polynomial(2, rng), random_polynomial(2, rng));
      const Field f = random_complex_polynomial(2, rng);
      const auto e = equilibrium_residual(f, sys, random_point(2, rng));
      CHECK_NEAR(e.residual, e.classical - e.structural - e.flow, 1e-10 * std::max(1.0, std::abs(e.residual)));
    }
  }
}

TEST_CASE("exponential solution") {
  CHECK_NEAR(exponential_solution(1.0, 0.5, 1.0), Complex(0.6065306597126334, 0), 1e-15);
  CHECK(exponential_solution(Complex(1, 2), 0.0, 3.0) == Complex(1, 2));
  CHECK(exponential_solution(Complex(1, 2), 4.0, 0.0) == Complex(1, 2));
  CHECK_NEAR(exponential_solution(1.0, -0.5, 2.0), Complex(std::numbers::e, 0), 1e-15);
}

TEST_CASE("beta") {
  CHECK(beta(system1("0"), point(1, 2)) == 0.0);
  CHECK(beta(system1("3"), point(1, 2)) == 0.0);
  // w = p, dw/dt = pdot = -3.5, beta = -3.5 + 4
  CHECK_NEAR(Complex(beta(system1("q1"), point(1, 2))), Complex(0.5, 0), 1e-14);
}

TEST_CASE("covariant acceleration") {
  SECTION("classical oscillator, f = q: qddot = -q") {
    CHECK_NEAR(covariant_acceleration(Field::q(1, 0), system1("0"), point(1, 0)), Complex(-1, 0), 1e-14);
    CHECK_NEAR(covariant_acceleration(Field::q(1, 0), system1("0"), point(0.3, 0.9)), Complex(-0.3, 0), 1e-14);
  }
  SECTION("f = 1 gives beta by both routes") {
    const auto sys = system1("q1");
    CHECK_NEAR(covariant_acceleration(Field(1.0), sys, point(1, 2)), Complex(0.5, 0), 1e-14);
    CHECK_NEAR(covariant_acceleration_nested(Field(1.0), sys, point(1, 2)), Complex(0.5, 0), 1e-14);
  }
  SECTION("f = q, s = q at (1,2)") {
    // qddot = pdot = -3.5, plus 2 w qdot = 8, plus q beta = 0.5
    const auto terms = acceleration_terms(Field::q(1, 0), system1("q1"), point(1, 2));
    CHECK_NEAR(terms.first, Complex(2, 0), 1e-14);
    CHECK_NEAR(terms.second, Complex(-3.5, 0), 1e-14);
    CHECK_NEAR(terms.total, Complex(5, 0), 1e-14);
  }
  SECTION("Hessian route matches nested route on random systems") {
    Rng rng(59);
    for (int k = 0; k < 100; ++k) {
      const std::size_t n = 1 + static_cast<std::size_t>(k % 2);
      const auto sys = StructuredSystem(n, random_polynomial(n, rng), random_polynomial(n, rng));
      const Field f = random_complex_polynomial(n, rng);
      const auto pt = random_point(n, rng);
      const Complex a = covariant_acceleration(f, sys, pt);
      CHECK_NEAR(a, covariant_acceleration_nested(f, sys, pt), 1e-8 * std::max(1.0, std::abs(a)));
    }
  }
}
