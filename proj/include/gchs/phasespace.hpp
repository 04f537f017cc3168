#pragma once

// Phase-space points. Storage is always the real pair (q, p); the complex
// coordinates z = q + i p are a derived view.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gchs {

using Complex = std::complex<double>;

inline constexpr Complex imaginary_unit{0.0, 1.0};

class PhasePoint {
 public:
  PhasePoint(std::vector<double> q, std::vector<double> p) : q_(std::move(q)), p_(std::move(p)) {
    if (q_.empty()) throw std::invalid_argument("phase point needs dimension n >= 1");
    if (q_.size() != p_.size()) throw std::invalid_argument("q and p must have the same length");
    for (std::size_t j = 0; j < q_.size(); ++j) {
      if (!std::isfinite(q_[j]) || !std::isfinite(p_[j]))
        throw std::invalid_argument("phase point coordinates must be finite");
    }
  }

  /// Builds a point from the flat layout (q1..qn, p1..pn).
  static PhasePoint from_coords(std::span<const double> x) {
    if (x.size() % 2 != 0) throw std::invalid_argument("flat coordinates must have even length");
    const auto n = x.size() / 2;
    return PhasePoint({x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)},
                      {x.begin() + static_cast<std::ptrdiff_t>(n), x.end()});
  }

  std::size_t dimension() const noexcept { return q_.size(); }
  std::span<const double> q() const noexcept { return q_; }
  std::span<const double> p() const noexcept { return p_; }
  double q(std::size_t j) const { return q_.at(j); }
  double p(std::size_t j) const { return p_.at(j); }

  /// Flat layout (q1..qn, p1..pn), the ordering used for all real partials.
  std::vector<double> coords() const {
    std::vector<double> x(q_);
    x.insert(x.end(), p_.begin(), p_.end());
    return x;
  }

  double norm() const noexcept {
    double sum = 0.0;
    for (std::size_t j = 0; j < q_.size(); ++j) sum += q_[j] * q_[j] + p_[j] * p_[j];
    return std::sqrt(sum);
  }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

 private:
  std::vector<double> q_;
  std::vector<double> p_;
};

class ComplexCoords {
 public:
  explicit ComplexCoords(std::vector<Complex> z) : z_(std::move(z)) {
    if (z_.empty()) throw std::invalid_argument("complex coordinates need dimension n >= 1");
  }

  std::size_t dimension() const noexcept { return z_.size(); }
  std::span<const Complex> z() const noexcept { return z_; }
  Complex operator[](std::size_t j) const { return z_.at(j); }

 private:
  std::vector<Complex> z_;
};

inline ComplexCoords to_complex(const PhasePoint& pt) {
  std::vector<Complex> z(pt.dimension());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = Complex(pt.q(j), pt.p(j));
  return ComplexCoords(std::move(z));
}

/// Throws std::invalid_argument on non-finite components.
inline PhasePoint from_complex(const ComplexCoords& zc) {
  std::vector<double> q(zc.dimension()), p(zc.dimension());
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = zc[j].real();
    p[j] = zc[j].imag();
  }
  return PhasePoint(std::move(q), std::move(p));
}

struct WirtingerPair {
  Complex dz;
  Complex dzbar;
};

struct RealPair {
  Complex dq;
  Complex dp;
};

/// d/dz = (d/dq - i d/dp)/2, d/dzbar = (d/dq + i d/dp)/2.
constexpr WirtingerPair wirtinger_from_real(Complex dq, Complex dp) {
  return {0.5 * (dq - imaginary_unit * dp), 0.5 * (dq + imaginary_unit * dp)};
}

/// Inverse of wirtinger_from_real: d/dq = d/dz + d/dzbar, d/dp = i (d/dz - d/dzbar).
constexpr RealPair real_from_wirtinger(Complex dz, Complex dzbar) {
  return {dz + dzbar, imaginary_unit * (dz - dzbar)};
}

}  // namespace gchs
