#pragma once

// Exact first and second partials of fields by forward-mode dual numbers over
// the 2n real coordinates. Wirtinger partials are then formed pointwise.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "gchs/dual.hpp"
#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

/// Value and real partials in the flat order (d/dq1..d/dqn, d/dp1..d/dpn).
struct RealJet {
  Complex value;
  std::vector<Complex> partials;

  std::size_t dimension() const noexcept { return partials.size() / 2; }
  Complex dq(std::size_t j) const { return partials.at(j); }
  Complex dp(std::size_t j) const { return partials.at(dimension() + j); }
};

struct WirtingerGradient {
  std::vector<Complex> dz;
  std::vector<Complex> dzbar;

  std::size_t dimension() const noexcept { return dz.size(); }
};

/// Symmetric matrix of second partials over the 2n real coordinates.
class SecondDerivatives {
 public:
  explicit SecondDerivatives(std::size_t size = 0) : size_(size), data_(size * size) {}

  std::size_t size() const noexcept { return size_; }
  Complex operator()(std::size_t a, std::size_t b) const { return data_[a * size_ + b]; }

  /// Sets (a,b) and (b,a) together so symmetry holds bit-for-bit.
  void set(std::size_t a, std::size_t b, Complex v) {
    data_[a * size_ + b] = v;
    data_[b * size_ + a] = v;
  }

 private:
  std::size_t size_;
  std::vector<Complex> data_;
};

struct SecondOrderJet {
  Complex value;
  std::vector<Complex> partials;
  SecondDerivatives hessian;
};

inline WirtingerGradient to_wirtinger(const RealJet& jet) {
  const std::size_t n = jet.dimension();
  WirtingerGradient g{std::vector<Complex>(n), std::vector<Complex>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const auto w = wirtinger_from_real(jet.dq(j), jet.dp(j));
    g.dz[j] = w.dz;
    g.dzbar[j] = w.dzbar;
  }
  return g;
}

/// Value and all 2n real partials of f at x, computed in scalar type S.
/// Nesting S = Dual<...> gives derivatives of derivatives.
template <class S>
std::pair<S, std::vector<S>> value_and_partials(const Field& f, std::span<const S> x, const S& time) {
  using D = Dual<S>;
  std::vector<D> seeded(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) seeded[a] = D(x[a]);
  const D t(time);
  std::vector<S> partials(x.size());
  S value = lift<S>(0.0);
  for (std::size_t a = 0; a < x.size(); ++a) {
    seeded[a].du = lift<S>(1.0);
    const D r = f.evaluate<D>(seeded, t);
    seeded[a].du = lift<S>(0.0);
    partials[a] = r.du;
    if (a == 0) value = r.re;
  }
  if (x.empty()) value = f.evaluate<S>(x, time);
  return {value, std::move(partials)};
}

namespace detail {

inline std::vector<Complex> complex_coords(const PhasePoint& pt) {
  std::vector<Complex> x;
  x.reserve(2 * pt.dimension());
  for (double v : pt.q()) x.emplace_back(v);
  for (double v : pt.p()) x.emplace_back(v);
  return x;
}

}  // namespace detail

inline RealJet real_jet(const Field& f, const PhasePoint& pt, double t = 0.0) {
  const auto x = detail::complex_coords(pt);
  auto [value, partials] = value_and_partials<Complex>(f, std::span<const Complex>(x), Complex(t));
  return {value, std::move(partials)};
}

/// Wirtinger partials (df/dz^j, df/dzbar^j) from exact real partials.
inline WirtingerGradient gradient(const Field& f, const PhasePoint& pt, double t = 0.0) {
  return to_wirtinger(real_jet(f, pt, t));
}

/// Value, gradient and Hessian from (2n)(2n+1)/2 nested-dual evaluations.
inline SecondOrderJet second_order_jet(const Field& f, const PhasePoint& pt, double t = 0.0) {
  using D1 = Dual<Complex>;
  using D2 = Dual<D1>;
  const auto x = detail::complex_coords(pt);
  const std::size_t m = x.size();
  std::vector<D2> seeded(m);
  for (std::size_t a = 0; a < m; ++a) seeded[a] = D2(D1(x[a]));
  const D2 time{D1(Complex(t))};

  SecondOrderJet jet{Complex{}, std::vector<Complex>(m), SecondDerivatives(m)};
  for (std::size_t a = 0; a < m; ++a) {
    seeded[a].du = D1(1.0);
    for (std::size_t b = a; b < m; ++b) {
      seeded[b].re.du = 1.0;
      const D2 r = f.evaluate<D2>(seeded, time);
      seeded[b].re.du = 0.0;
      jet.hessian.set(a, b, r.du.du);
      if (a == b) {
        jet.partials[a] = r.du.re;
        jet.value = r.re.re;
      }
    }
    seeded[a].du = D1(0.0);
  }
  return jet;
}

inline SecondDerivatives second_derivatives(const Field& f, const PhasePoint& pt, double t = 0.0) {
  return second_order_jet(f, pt, t).hessian;
}

}  // namespace gchs
