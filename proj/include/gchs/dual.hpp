#pragma once

// Forward-mode dual numbers over complex values.
//
// Dual<V> carries a value and one directional derivative with respect to a
// *real* coordinate. Because the seed direction is real, conj() commutes with
// differentiation and complex-valued fields of real variables are handled
// exactly. Nesting Dual<Dual<Complex>> yields mixed second partials:
//   f(x + e1 a + e2 b) = f + e1 a f_x + e2 b f_y + e1 e2 a b f_xy.

#include <cmath>
#include <complex>
#include <type_traits>

namespace gchs {

template <class V>
struct Dual {
  using value_type = V;

  V re{};
  V du{};

  constexpr Dual() = default;
  constexpr Dual(V value, V derivative = V{}) : re(value), du(derivative) {}

  constexpr Dual& operator+=(const Dual& o) {
    re += o.re;
    du += o.du;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    re -= o.re;
    du -= o.du;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) { return *this = *this * o; }
  constexpr Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.re + b.re, a.du + b.du}; }
  friend constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.re - b.re, a.du - b.du}; }
  friend constexpr Dual operator-(const Dual& a) { return {-a.re, -a.du}; }
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.re * b.re, a.du * b.re + a.re * b.du};
  }
  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    return {a.re / b.re, (a.du * b.re - a.re * b.du) / (b.re * b.re)};
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class V>
struct is_dual<Dual<V>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

/// Embeds a complex constant into S (zero derivative at every level).
template <class S>
constexpr S lift(std::complex<double> c) {
  if constexpr (is_dual_v<S>) {
    return S(lift<typename S::value_type>(c));
  } else {
    return S(c);
  }
}

/// Innermost complex value of a (possibly nested) dual.
template <class S>
constexpr std::complex<double> primal(const S& x) {
  if constexpr (is_dual_v<S>) {
    return primal(x.re);
  } else {
    return x;
  }
}

template <class V>
Dual<V> sin(const Dual<V>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.re), cos(a.re) * a.du};
}

template <class V>
Dual<V> cos(const Dual<V>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.re), -sin(a.re) * a.du};
}

template <class V>
Dual<V> exp(const Dual<V>& a) {
  using std::exp;
  const V e = exp(a.re);
  return {e, e * a.du};
}

template <class V>
Dual<V> log(const Dual<V>& a) {
  using std::log;
  return {log(a.re), a.du / a.re};
}

template <class V>
Dual<V> conj(const Dual<V>& a) {
  using std::conj;
  return {conj(a.re), conj(a.du)};
}

}  // namespace gchs
