#pragma once

// Finite-difference oracle for field derivatives. Uses plain complex
// evaluation only, never the dual-number path it is meant to check.

#include <cstddef>
#include <vector>

#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs::testing {

namespace detail {

inline Complex eval_shifted(const Field& f, std::vector<double> x, std::size_t a, double da, std::size_t b = 0,
                            double db = 0.0) {
  x[a] += da;
  x[b] += db;
  return f(PhasePoint::from_coords(x));
}

}  // namespace detail

/// Central differences (f(x + h e_a) - f(x - h e_a)) / 2h for every a.
inline std::vector<Complex> central_gradient(const Field& f, const PhasePoint& pt, double h = 1e-5) {
  const auto x = pt.coords();
  std::vector<Complex> out(x.size());
  for (std::size_t a = 0; a < x.size(); ++a)
    out[a] = (detail::eval_shifted(f, x, a, h) - detail::eval_shifted(f, x, a, -h)) / (2.0 * h);
  return out;
}

/// Second partials: three-point rule on the diagonal, four-point rule off it.
/// Row-major (2n)x(2n).
inline std::vector<Complex> central_hessian(const Field& f, const PhasePoint& pt, double h = 1e-4) {
  const auto x = pt.coords();
  const std::size_t m = x.size();
  const Complex f0 = f(pt);
  std::vector<Complex> out(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    out[a * m + a] =
        (detail::eval_shifted(f, x, a, h) - 2.0 * f0 + detail::eval_shifted(f, x, a, -h)) / (h * h);
    for (std::size_t b = a + 1; b < m; ++b) {
      const Complex v = (detail::eval_shifted(f, x, a, h, b, h) - detail::eval_shifted(f, x, a, h, b, -h) -
                         detail::eval_shifted(f, x, a, -h, b, h) + detail::eval_shifted(f, x, a, -h, b, -h)) /
                        (4.0 * h * h);
      out[a * m + b] = v;
      out[b * m + a] = v;
    }
  }
  return out;
}

}  // namespace gchs::testing
