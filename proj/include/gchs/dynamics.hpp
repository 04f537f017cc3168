#pragma once

// Thorough generalized Hamiltonian flow (TGHS), S-dynamics w = {s,H}_PB and
// the covariant time derivative D/dt = d/dt + w, including the second
// covariant derivative D^2 f/dt^2 = d^2f/dt^2 + 2w df/dt + f beta.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gchs/brackets.hpp"
#include "gchs/derivatives.hpp"
#include "gchs/dual.hpp"
#include "gchs/errors.hpp"
#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

/// H and s with their Wirtinger gradients at one point.
struct SystemSample {
  FieldSample hamiltonian;
  FieldSample structural;
};

inline SystemSample sample(const StructuredSystem& sys, const PhasePoint& pt) {
  return {sample(sys.hamiltonian(), pt), sample(sys.structural(), pt)};
}

struct TghsVelocity {
  std::vector<Complex> dz;     // dz^j/dt = -2i DH/dzbar^j
  std::vector<Complex> dzbar;  // dzbar^j/dt = 2i DH/dz^j
};

struct CovariantRate {
  Complex total;     // Df/dt = {f,H}
  Complex thorough;  // df/dt
  double sdyn;       // w
  Complex value;     // f
};

struct EquilibriumResidual {
  Complex residual;    // {f,H}, zero at covariant equilibrium
  Complex classical;   // {f,H}_PB
  Complex structural;  // H{s,f}_PB
  Complex flow;        // -f w
};

inline TghsVelocity tghs_velocity(const SystemSample& ss) {
  const auto dh = structural_derivative(ss.hamiltonian.value, ss.hamiltonian.grad, ss.structural.grad);
  TghsVelocity v{std::vector<Complex>(dh.dimension()), std::vector<Complex>(dh.dimension())};
  for (std::size_t j = 0; j < dh.dimension(); ++j) {
    v.dz[j] = -2.0 * imaginary_unit * dh.dzbar[j];
    v.dzbar[j] = 2.0 * imaginary_unit * dh.dz[j];
  }
  return v;
}

inline TghsVelocity tghs_velocity(const StructuredSystem& sys, const PhasePoint& pt) {
  return tghs_velocity(sample(sys, pt));
}

/// (dq/dt, dp/dt) in the flat layout, i.e. the real and imaginary parts of dz/dt.
inline std::vector<double> tghs_real_velocity(const StructuredSystem& sys, const PhasePoint& pt) {
  const auto v = tghs_velocity(sys, pt);
  const std::size_t n = v.dz.size();
  std::vector<double> out(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = v.dz[j].real();
    out[n + j] = v.dz[j].imag();
  }
  return out;
}

/// w = {s,H}_PB, cross-checked against {1,H} and the structural-derivative form.
/// A non-real w means H or s is not real-valued and raises InputError.
inline double s_dynamics(const SystemSample& ss) {
  const auto& h = ss.hamiltonian;
  const auto& ds = ss.structural.grad;
  const Complex w = pb_complex(ds, h.grad);

  const auto dh = structural_derivative(h.value, h.grad, ds);
  Complex sum{};
  for (std::size_t j = 0; j < ds.dimension(); ++j) sum += dh.dz[j] * ds.dzbar[j] - dh.dzbar[j] * ds.dz[j];
  const Complex structural_form = 2.0 * imaginary_unit * sum;

  const std::size_t n = ds.dimension();
  const FieldSample unit{1.0, {std::vector<Complex>(n), std::vector<Complex>(n)}};
  const Complex unit_bracket = gspb(unit, h, ds);

  if (!agrees(w, structural_form, 1e-10) || !agrees(w, unit_bracket, 1e-10))
    throw ConsistencyError("S-dynamics forms disagree");
  if (std::abs(w.imag()) > 1e-10 * std::max(1.0, std::abs(w.real())))
    throw InputError("S-dynamics w is not real (imaginary part " + detail::format_real(w.imag()) +
                     "); H and s must be real-valued");
  return w.real();
}

inline double s_dynamics(const StructuredSystem& sys, const PhasePoint& pt) { return s_dynamics(sample(sys, pt)); }

/// df/dt by the chain rule sum_j (dzbar^j/dt df/dzbar^j + dz^j/dt df/dz^j).
inline Complex chain_rule_rate(const WirtingerGradient& df, const TghsVelocity& v) {
  Complex sum{};
  for (std::size_t j = 0; j < df.dimension(); ++j) sum += v.dzbar[j] * df.dzbar[j] + v.dz[j] * df.dz[j];
  return sum;
}

/// df/dt = {f,H}_PB - H{s,f}_PB, evaluated by the chain rule along the TGHS flow.
inline Complex thorough_rate(const FieldSample& f, const SystemSample& ss) {
  const Complex chain = chain_rule_rate(f.grad, tghs_velocity(ss));
  const Complex brackets = pb_complex(f.grad, ss.hamiltonian.grad) -
                           ss.hamiltonian.value * pb_complex(ss.structural.grad, f.grad);
  if (!agrees(chain, brackets, 1e-10)) throw ConsistencyError("thorough rate forms disagree");
  return chain;
}

inline Complex thorough_rate(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  return thorough_rate(sample(f, pt), sample(sys, pt));
}

inline CovariantRate gchs_rate(const FieldSample& f, const SystemSample& ss) {
  const auto& h = ss.hamiltonian;
  const auto& ds = ss.structural.grad;
  const Complex thorough = pb_complex(f.grad, h.grad) - h.value * pb_complex(ds, f.grad);
  const double w = s_dynamics(ss);
  const Complex total = thorough + f.value * w;

  const Complex chain = chain_rule_rate(structural_derivative(f.value, f.grad, ds), tghs_velocity(ss));
  if (!agrees(total, chain, 1e-10)) throw ConsistencyError("covariant rate forms disagree");
  return {total, thorough, w, f.value};
}

inline CovariantRate gchs_rate(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  return gchs_rate(sample(f, pt), sample(sys, pt));
}

inline EquilibriumResidual equilibrium_residual(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  const auto fs = sample(f, pt);
  const auto ss = sample(sys, pt);
  const auto& ds = ss.structural.grad;
  EquilibriumResidual r;
  r.residual = gspb(fs, ss.hamiltonian, ds);
  r.classical = pb_complex(fs.grad, ss.hamiltonian.grad);
  r.structural = ss.hamiltonian.value * pb_complex(ds, fs.grad);
  r.flow = -fs.value * s_dynamics(ss);
  return r;
}

/// z0 exp(-w0 t): the covariant-equilibrium flow for constant w.
inline Complex exponential_solution(Complex z0, double w0, double t) { return z0 * std::exp(-w0 * t); }

// ---------------------------------------------------------------------------
// Second order

namespace detail {

// Real TGHS velocity v and its Jacobian dv_b/dx_a from second-order jets of H and s.
struct FlowJacobian {
  std::vector<double> velocity;           // 2n
  std::vector<std::vector<double>> dvel;  // dvel[a][b] = d v_b / d x_a
  double w = 0.0;
  std::vector<double> dw;                 // dw/dx_a
  double dw_dt = 0.0;                     // dw . velocity
};

inline FlowJacobian flow_jacobian(const SecondOrderJet& h, const SecondOrderJet& s) {
  const std::size_t m = h.partials.size();
  const std::size_t n = m / 2;
  const Complex i = imaginary_unit;
  auto wz = [&](const std::vector<Complex>& g, std::size_t j) { return 0.5 * (g[j] - i * g[n + j]); };
  auto wzbar = [&](const std::vector<Complex>& g, std::size_t j) { return 0.5 * (g[j] + i * g[n + j]); };
  auto d_wz = [&](const SecondDerivatives& hess, std::size_t j, std::size_t a) {
    return 0.5 * (hess(j, a) - i * hess(n + j, a));
  };
  auto d_wzbar = [&](const SecondDerivatives& hess, std::size_t j, std::size_t a) {
    return 0.5 * (hess(j, a) + i * hess(n + j, a));
  };

  FlowJacobian out;
  out.velocity.assign(m, 0.0);
  out.dvel.assign(m, std::vector<double>(m, 0.0));
  Complex w{};
  for (std::size_t j = 0; j < n; ++j) {
    const Complex zdot = -2.0 * i * (wzbar(h.partials, j) + h.value * wzbar(s.partials, j));
    out.velocity[j] = zdot.real();
    out.velocity[n + j] = zdot.imag();
    w += wzbar(s.partials, j) * wz(h.partials, j) - wz(s.partials, j) * wzbar(h.partials, j);
    for (std::size_t a = 0; a < m; ++a) {
      const Complex dzdot = -2.0 * i *
                            (d_wzbar(h.hessian, j, a) + h.partials[a] * wzbar(s.partials, j) +
                             h.value * d_wzbar(s.hessian, j, a));
      out.dvel[a][j] = dzdot.real();
      out.dvel[a][n + j] = dzdot.imag();
    }
  }
  out.w = (2.0 * i * w).real();

  out.dw.assign(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    Complex dw{};
    for (std::size_t j = 0; j < n; ++j) {
      dw += d_wzbar(s.hessian, j, a) * wz(h.partials, j) + wzbar(s.partials, j) * d_wz(h.hessian, j, a) -
            d_wz(s.hessian, j, a) * wzbar(h.partials, j) - wz(s.partials, j) * d_wzbar(h.hessian, j, a);
    }
    out.dw[a] = (2.0 * i * dw).real();
    out.dw_dt += out.dw[a] * out.velocity[a];
  }
  return out;
}

inline FlowJacobian flow_jacobian(const StructuredSystem& sys, const PhasePoint& pt) {
  return flow_jacobian(second_order_jet(sys.hamiltonian(), pt), second_order_jet(sys.structural(), pt));
}

}  // namespace detail

/// beta = dw/dt + w^2, with dw/dt from second partials of H and s.
inline double beta(const StructuredSystem& sys, const PhasePoint& pt) {
  const auto flow = detail::flow_jacobian(second_order_jet(sys.hamiltonian(), pt),
                                          second_order_jet(sys.structural(), pt));
  return flow.dw_dt + flow.w * flow.w;
}

struct AccelerationTerms {
  Complex value;          // f
  Complex first;          // df/dt
  Complex second;         // d^2f/dt^2
  double w = 0.0;
  double beta = 0.0;
  Complex total;          // D^2 f/dt^2
};

inline AccelerationTerms acceleration_terms(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  const auto fj = second_order_jet(f, pt);
  const auto flow = detail::flow_jacobian(second_order_jet(sys.hamiltonian(), pt),
                                          second_order_jet(sys.structural(), pt));
  const std::size_t m = fj.partials.size();
  AccelerationTerms out;
  out.value = fj.value;
  for (std::size_t b = 0; b < m; ++b) out.first += fj.partials[b] * flow.velocity[b];
  for (std::size_t a = 0; a < m; ++a) {
    Complex d_first{};
    for (std::size_t b = 0; b < m; ++b)
      d_first += fj.hessian(a, b) * flow.velocity[b] + fj.partials[b] * flow.dvel[a][b];
    out.second += d_first * flow.velocity[a];
  }
  out.w = flow.w;
  out.beta = flow.dw_dt + flow.w * flow.w;
  out.total = out.second + 2.0 * out.w * out.first + out.value * out.beta;
  return out;
}

/// D^2 f/dt^2 = d^2f/dt^2 + 2w df/dt + f beta.
inline Complex covariant_acceleration(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  return acceleration_terms(f, sys, pt).total;
}

/// Df/dt = sum_a (df/dx_a) v_a + f w at flat coordinates x, in any scalar type.
/// Uses the real-coordinate velocity dq/dt = H_p + H s_p, dp/dt = -(H_q + H s_q).
template <class S>
S covariant_rate_at(const Field& f, const StructuredSystem& sys, std::span<const S> x) {
  const S t0 = lift<S>(0.0);
  const auto [fv, fp] = value_and_partials<S>(f, x, t0);
  const auto [hv, hp] = value_and_partials<S>(sys.hamiltonian(), x, t0);
  const auto [sv, sp] = value_and_partials<S>(sys.structural(), x, t0);
  (void)sv;
  const std::size_t n = x.size() / 2;
  S rate = lift<S>(0.0);
  S w = lift<S>(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const S qdot = hp[n + j] + hv * sp[n + j];
    const S pdot = -(hp[j] + hv * sp[j]);
    rate += fp[j] * qdot + fp[n + j] * pdot;
    w += sp[j] * hp[n + j] - sp[n + j] * hp[j];
  }
  return rate + fv * w;
}

/// D/dt applied to the field F = Df/dt, with dF/dx from nested dual numbers.
/// Independent of the Hessian-based route in acceleration_terms().
inline Complex covariant_acceleration_nested(const Field& f, const StructuredSystem& sys, const PhasePoint& pt) {
  using D = Dual<Complex>;
  const auto x = detail::complex_coords(pt);
  const std::size_t m = x.size();
  std::vector<D> seeded(m);
  for (std::size_t a = 0; a < m; ++a) seeded[a] = D(x[a]);

  std::vector<Complex> dF(m);
  Complex F{};
  for (std::size_t a = 0; a < m; ++a) {
    seeded[a].du = 1.0;
    const D r = covariant_rate_at<D>(f, sys, seeded);
    seeded[a].du = 0.0;
    dF[a] = r.du;
    F = r.re;
  }
  const auto velocity = tghs_real_velocity(sys, pt);
  const double w = s_dynamics(sys, pt);
  Complex total = F * w;
  for (std::size_t a = 0; a < m; ++a) total += dF[a] * velocity[a];
  return total;
}

}  // namespace gchs
