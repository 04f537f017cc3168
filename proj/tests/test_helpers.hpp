#pragma once

#include <complex>
#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "gchs/phasespace.hpp"

namespace gchs::test {

inline bool near(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

inline PhasePoint point(double q, double p) { return PhasePoint({q}, {p}); }

}  // namespace gchs::test

// Complex comparison that prints both sides on failure.
#define CHECK_NEAR(a, b, tol)                                          \
  do {                                                                 \
    const auto check_near_a_ = (a);                                    \
    const auto check_near_b_ = (b);                                    \
    INFO(#a " = " << check_near_a_ << ", expected " << check_near_b_); \
    CHECK(::gchs::test::near(check_near_a_, check_near_b_, (tol)));    \
  } while (false)
