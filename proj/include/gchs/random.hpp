#pragma once

// Seeded generators for random points and random fields, used by the
// invariant suites.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

using Rng = std::mt19937_64;

/// Uniform point in the box center +- radius (center empty means the origin).
inline PhasePoint random_point(std::size_t n, Rng& rng, double radius = 1.0, std::span<const double> center = {}) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<double> x(2 * n);
  for (std::size_t a = 0; a < x.size(); ++a) x[a] = (center.empty() ? 0.0 : center[a]) + u(rng);
  return PhasePoint::from_coords(x);
}

/// Real polynomial in the 2n coordinates: `terms` monomials of degree
/// 0..max_degree with coefficients uniform in [-1, 1].
inline Field random_polynomial(std::size_t n, Rng& rng, int max_degree = 4, int terms = 5) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_int_distribution<std::size_t> coord(0, 2 * n - 1);
  Field sum = Field(0.0).with_dimension(n);
  for (int k = 0; k < terms; ++k) {
    Field term(coeff(rng));
    const int d = degree(rng);
    for (int e = 0; e < d; ++e) {
      const std::size_t a = coord(rng);
      term = term * (a < n ? Field::q(n, a) : Field::p(n, a - n));
    }
    sum = sum + term;
  }
  return sum;
}

/// Real field mixing a polynomial with sin, cos and exp of low-degree
/// polynomials; smooth everywhere.
inline Field random_smooth_field(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Field f = random_polynomial(n, rng, 3, 3);
  // One draw per statement keeps the sequence independent of operand evaluation order.
  const double a = coeff(rng);
  f = f + Field(a) * sin(random_polynomial(n, rng, 2, 2));
  const double b = coeff(rng);
  f = f + Field(b) * cos(random_polynomial(n, rng, 2, 2));
  const double c = coeff(rng);
  f = f + Field(c) * exp(Field(0.5) * random_polynomial(n, rng, 1, 2));
  return f;
}

/// Complex-valued field u + i v with u, v random polynomials.
inline Field random_complex_polynomial(std::size_t n, Rng& rng, int max_degree = 4) {
  Field u = random_polynomial(n, rng, max_degree);
  Field v = random_polynomial(n, rng, max_degree);
  return u + Field::imaginary() * v;
}

}  // namespace gchs
