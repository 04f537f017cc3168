#pragma once

// Real-coordinate GSPB and GCHS with the canonical symplectic structure.
// Shares nothing with the complex engine beyond the real partials, so the two
// can be cross-checked against each other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "gchs/brackets.hpp"
#include "gchs/derivatives.hpp"
#include "gchs/dynamics.hpp"
#include "gchs/errors.hpp"
#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

/// {f,g}_PB + f{s,g}_PB - g{s,f}_PB, all brackets in real coordinates.
inline Complex gspb_real(const Field& f, const Field& g, const StructuredSystem& sys, const PhasePoint& pt) {
  const auto fj = real_jet(f, pt);
  const auto gj = real_jet(g, pt);
  const auto sj = real_jet(sys.structural(), pt);
  return pb_real(fj, gj) + fj.value * pb_real(sj, gj) - gj.value * pb_real(sj, fj);
}

/// thorough = {f,H}_PB - H{s,f}_PB, sdyn = {s,H}_PB, total = thorough + f sdyn.
inline CovariantRate gchs_real_rate(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  const auto fj = real_jet(f, pt);
  const auto hj = real_jet(sys.hamiltonian(), pt);
  const auto sj = real_jet(sys.structural(), pt);
  const Complex thorough = pb_real(fj, hj) - hj.value * pb_real(sj, fj);
  const Complex w = pb_real(sj, hj);
  return {thorough + fj.value * w, thorough, w.real(), fj.value};
}

struct CrossCheckReport {
  double max_gspb_dev = 0.0;  // |gspb - gspb_real|
  double max_rate_dev = 0.0;  // |gchs_rate.total - gchs_real_rate.total|
  double max_w_dev = 0.0;     // |w_complex - w_real|
  std::size_t evaluated = 0;
  std::size_t skipped = 0;    // points outside the domain of a field
};

inline CrossCheckReport cross_check(const Field& f, const Field& g, const StructuredSystem& sys,
                                    std::span<const PhasePoint> points) {
  if (points.empty()) throw std::invalid_argument("cross_check needs at least one point");
  CrossCheckReport r;
  for (const auto& pt : points) {
    try {
      const Complex complex_side = gspb(f, g, sys, pt);
      const Complex real_side = gspb_real(f, g, sys, pt);
      const auto rate = gchs_rate(f, sys, pt);
      const auto real_rate = gchs_real_rate(f, sys, pt);
      r.max_gspb_dev = std::max(r.max_gspb_dev, std::abs(complex_side - real_side));
      r.max_rate_dev = std::max(r.max_rate_dev, std::abs(rate.total - real_rate.total));
      r.max_w_dev = std::max(r.max_w_dev, std::abs(rate.sdyn - real_rate.sdyn));
      ++r.evaluated;
    } catch (const DomainError&) {
      ++r.skipped;
    }
  }
  return r;
}

}  // namespace gchs
