#pragma once

// Poisson brackets in real and complex coordinates, the structural derivative,
// the geometric bracket and the generalized structural Poisson bracket (GSPB).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gchs/derivatives.hpp"
#include "gchs/errors.hpp"
#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

/// Absolute tolerance scaled by the magnitude of the compared quantities.
inline bool agrees(Complex a, Complex b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

/// Dimension n, Hamiltonian H and structural function s. H and s must be
/// real-valued; this is checked numerically on construction.
class StructuredSystem {
 public:
  StructuredSystem(std::size_t n, Field hamiltonian, Field structural)
      : n_(n), hamiltonian_(std::move(hamiltonian)), structural_(std::move(structural)) {
    if (n_ == 0) throw InputError("dimension must be positive");
    check_field("hamiltonian", hamiltonian_);
    check_field("structural function", structural_);
  }

  std::size_t dimension() const noexcept { return n_; }
  const Field& hamiltonian() const noexcept { return hamiltonian_; }
  const Field& structural() const noexcept { return structural_; }

 private:
  void check_field(const std::string& role, const Field& f) const {
    if (f.dimension() != 0 && f.dimension() != n_)
      throw InputError(role + " has dimension " + std::to_string(f.dimension()) + ", system has " +
                       std::to_string(n_));
    if (f.depends_on_time()) throw InputError(role + " must not depend on time");
    // Sample the positive orthant so log(q) and friends stay on their real branch.
    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> coord(0.25, 1.25);
    for (int k = 0; k < 8; ++k) {
      std::vector<double> q(n_), p(n_);
      for (auto& v : q) v = coord(rng);
      for (auto& v : p) v = coord(rng);
      Complex value;
      try {
        value = f(PhasePoint(std::move(q), std::move(p)));
      } catch (const DomainError&) {
        continue;
      }
      if (std::abs(value.imag()) > 1e-12 * std::max(1.0, std::abs(value.real())))
        throw InputError(role + " must be real-valued (realness rule), found imaginary part " +
                         detail::format_real(value.imag()));
    }
  }

  std::size_t n_;
  Field hamiltonian_;
  Field structural_;
};

/// A field value together with its Wirtinger gradient at one point.
struct FieldSample {
  Complex value;
  WirtingerGradient grad;
};

inline FieldSample sample(const Field& f, const PhasePoint& pt) {
  auto jet = real_jet(f, pt);
  return {jet.value, to_wirtinger(jet)};
}

// ---------------------------------------------------------------------------
// Kernels on precomputed derivatives

/// sum_j (df/dq^j dg/dp^j - df/dp^j dg/dq^j)
inline Complex pb_real(const RealJet& f, const RealJet& g) {
  Complex sum{};
  for (std::size_t j = 0; j < f.dimension(); ++j) sum += f.dq(j) * g.dp(j) - f.dp(j) * g.dq(j);
  return sum;
}

/// 2i sum_j (df/dzbar^j dg/dz^j - df/dz^j dg/dzbar^j)
inline Complex pb_complex(const WirtingerGradient& f, const WirtingerGradient& g) {
  Complex sum{};
  for (std::size_t j = 0; j < f.dimension(); ++j) sum += f.dzbar[j] * g.dz[j] - f.dz[j] * g.dzbar[j];
  return 2.0 * imaginary_unit * sum;
}

/// Df/dz^j = df/dz^j + f ds/dz^j, and likewise for zbar.
inline WirtingerGradient structural_derivative(Complex f, const WirtingerGradient& df, const WirtingerGradient& ds) {
  WirtingerGradient out = df;
  for (std::size_t j = 0; j < df.dimension(); ++j) {
    out.dz[j] += f * ds.dz[j];
    out.dzbar[j] += f * ds.dzbar[j];
  }
  return out;
}

/// f{s,g}_PB - g{s,f}_PB
inline Complex geobracket(const FieldSample& f, const FieldSample& g, const WirtingerGradient& ds) {
  return f.value * pb_complex(ds, g.grad) - g.value * pb_complex(ds, f.grad);
}

/// The GSPB written with structural derivatives: 2i sum (Df/dzbar Dg/dz - Df/dz Dg/dzbar).
inline Complex gspb_structural_form(const FieldSample& f, const FieldSample& g, const WirtingerGradient& ds) {
  return pb_complex(structural_derivative(f.value, f.grad, ds), structural_derivative(g.value, g.grad, ds));
}

/// {f,g}_PB + G(s,f,g); cross-checked against the structural-derivative form.
inline Complex gspb(const FieldSample& f, const FieldSample& g, const WirtingerGradient& ds) {
  const Complex value = pb_complex(f.grad, g.grad) + geobracket(f, g, ds);
  const Complex alternate = gspb_structural_form(f, g, ds);
  if (!agrees(value, alternate, 1e-10))
    throw ConsistencyError("GSPB forms disagree: " + std::to_string(std::abs(value - alternate)));
  return value;
}

// ---------------------------------------------------------------------------
// Field-level API

inline Complex pb_real(const Field& f, const Field& g, const PhasePoint& pt) {
  return pb_real(real_jet(f, pt), real_jet(g, pt));
}

inline Complex pb_complex(const Field& f, const Field& g, const PhasePoint& pt) {
  return pb_complex(gradient(f, pt), gradient(g, pt));
}

inline WirtingerGradient structural_derivative(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  const auto fs = sample(f, pt);
  return structural_derivative(fs.value, fs.grad, gradient(sys.structural(), pt));
}

inline Complex geobracket(const Field& f, const Field& g, const StructuredSystem& sys, const PhasePoint& pt) {
  return geobracket(sample(f, pt), sample(g, pt), gradient(sys.structural(), pt));
}

inline Complex gspb_structural_form(const Field& f, const Field& g, const StructuredSystem& sys,
                                    const PhasePoint& pt) {
  return gspb_structural_form(sample(f, pt), sample(g, pt), gradient(sys.structural(), pt));
}

inline Complex gspb(const Field& f, const Field& g, const StructuredSystem& sys, const PhasePoint& pt) {
  return gspb(sample(f, pt), sample(g, pt), gradient(sys.structural(), pt));
}

/// Structural brackets {s, z^j}_PB = 2i ds/dzbar^j and {s, zbar^j}_PB = -2i ds/dz^j.
struct Geometrio {  // with_z[j] = {s, z^j}_PB, with_zbar[j] = {s, zbar^j}_PB
  std::vector<Complex> with_z;
  std::vector<Complex> with_zbar;
};

inline Geometrio geometrio(const WirtingerGradient& ds) {
  Geometrio out{std::vector<Complex>(ds.dimension()), std::vector<Complex>(ds.dimension())};
  for (std::size_t j = 0; j < ds.dimension(); ++j) {
    out.with_z[j] = 2.0 * imaginary_unit * ds.dzbar[j];
    out.with_zbar[j] = -2.0 * imaginary_unit * ds.dz[j];
  }
  return out;
}

inline Geometrio geometrio(const StructuredSystem& sys, const PhasePoint& pt) {
  return geometrio(gradient(sys.structural(), pt));
}

}  // namespace gchs
