#pragma once

// Time integration of the TGHS flow and of the covariant-equilibrium /
// perturbed flows dz/dt = -z w + h(t, z), with per-sample monitors.
//
// All steppers work on the real state (q1..qn, p1..pn).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gchs/brackets.hpp"
#include "gchs/dynamics.hpp"
#include "gchs/errors.hpp"
#include "gchs/field.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

enum class StepMethod { rk4, rk45 };

struct StepperConfig {
  StepMethod method = StepMethod::rk4;
  double step = 1e-3;       // fixed step (rk4) or initial step (rk45)
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double t_end = 1.0;
  std::size_t stride = 1;   // record every stride-th accepted step
  double blowup_norm = 1e12;
  double min_step = 1e-14;

  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be positive");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite and >= 0");
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    if (!(blowup_norm > 0.0)) throw std::invalid_argument("blowup_norm must be positive");
  }
};

/// Right-hand side signature: rhs(t, y, dydt).
/// Observer signature: observe(t, y, record) after the initial state and every
/// accepted step; record is true on sampled steps and always on the last one.
template <class Rhs, class Observer>
void solve_ode(Rhs&& rhs, std::vector<double> y, const StepperConfig& cfg, Observer&& observe) {
  cfg.validate();
  const std::size_t m = y.size();
  auto check_state = [&](double t) {
    double norm2 = 0.0;
    for (double v : y) norm2 += v * v;
    if (!std::isfinite(norm2)) throw IntegrationError(t, "state became non-finite");
    if (std::sqrt(norm2) > cfg.blowup_norm) throw IntegrationError(t, "blow-up: state norm exceeded threshold");
  };

  double t = 0.0;
  observe(t, std::span<const double>(y), true);
  if (cfg.t_end == 0.0) return;

  std::vector<double> tmp(m), y_new(m);
  std::size_t accepted = 0;

  if (cfg.method == StepMethod::rk4) {
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_end / cfg.step - 1e-9)));
    const double h = cfg.t_end / static_cast<double>(steps);
    std::array<std::vector<double>, 4> k;
    for (auto& ki : k) ki.resize(m);
    for (std::size_t s = 1; s <= steps; ++s) {
      rhs(t, std::span<const double>(y), std::span<double>(k[0]));
      for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k[0][i];
      rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k[1]));
      for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k[1][i];
      rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k[2]));
      for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k[2][i];
      rhs(t + h, std::span<const double>(tmp), std::span<double>(k[3]));
      for (std::size_t i = 0; i < m; ++i) y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
      t = (s == steps) ? cfg.t_end : static_cast<double>(s) * h;
      check_state(t);
      ++accepted;
      observe(t, std::span<const double>(y), s == steps || accepted % cfg.stride == 0);
    }
    return;
  }

  // Dormand-Prince 5(4) with a PI step-size controller.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::array<std::vector<double>, 7> k;
  for (auto& ki : k) ki.resize(m);
  double h = std::min(cfg.step, cfg.t_end);
  double err_prev = 1e-4;
  rhs(t, std::span<const double>(y), std::span<double>(k[0]));

  while (t < cfg.t_end) {
    const bool last = t + h >= cfg.t_end * (1.0 - 1e-15);
    if (last) h = cfg.t_end - t;
    if (h < cfg.min_step * std::max(1.0, std::abs(t))) throw IntegrationError(t, "step size underflow");

    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * a21 * k[0][i];
    rhs(t + c2 * h, std::span<const double>(tmp), std::span<double>(k[1]));
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    rhs(t + c3 * h, std::span<const double>(tmp), std::span<double>(k[2]));
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    rhs(t + c4 * h, std::span<const double>(tmp), std::span<double>(k[3]));
    for (std::size_t i = 0; i < m; ++i)
      tmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    rhs(t + c5 * h, std::span<const double>(tmp), std::span<double>(k[4]));
    for (std::size_t i = 0; i < m; ++i)
      tmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] + a65 * k[4][i]);
    rhs(t + h, std::span<const double>(tmp), std::span<double>(k[5]));
    for (std::size_t i = 0; i < m; ++i)
      y_new[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] + b6 * k[5][i]);
    rhs(t + h, std::span<const double>(y_new), std::span<double>(k[6]));

    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err += (e / scale) * (e / scale);
    }
    err = m == 0 ? 0.0 : std::sqrt(err / static_cast<double>(m));
    if (!std::isfinite(err)) throw IntegrationError(t, "state became non-finite");

    if (err <= 1.0) {
      t = last ? cfg.t_end : t + h;
      y.swap(y_new);
      k[0].swap(k[6]);  // first-same-as-last
      check_state(t);
      ++accepted;
      observe(t, std::span<const double>(y), last || accepted % cfg.stride == 0);
      const double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      h *= std::clamp(factor, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      if (last) break;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
    }
  }
}

// ---------------------------------------------------------------------------
// Trajectories

struct Observable {
  std::string name;
  Field field;
};

/// One recorded sample. Monitors that do not apply to a run are NaN.
struct Sample {
  double t = 0.0;
  PhasePoint state;
  double hamiltonian = std::numeric_limits<double>::quiet_NaN();
  double sdyn = std::numeric_limits<double>::quiet_NaN();
  std::vector<Complex> observables{};  // f(t)
  std::vector<Complex> residuals{};    // {f,H}(t)
  double decay_deviation = std::numeric_limits<double>::quiet_NaN();
  double conjugate_violation = std::numeric_limits<double>::quiet_NaN();
  double self_bracket = std::numeric_limits<double>::quiet_NaN();  // |{H,H}|
};

struct Trajectory {
  std::size_t dimension = 0;
  std::vector<std::string> observable_names;
  std::vector<Sample> samples;

  std::vector<double> times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t);
    return out;
  }
};

namespace detail {

// Trapezoid rule over every accepted step with the endpoint-derivative
// correction -h^2/12 (v'(b) - v'(a)), which lifts it from O(h^2) to O(h^4).
class RunningIntegral {
 public:
  double add(double t, double value, double slope) {
    if (started_) {
      const double h = t - t_prev_;
      total_ += 0.5 * h * (value + v_prev_) - h * h / 12.0 * (slope - s_prev_);
    }
    started_ = true;
    t_prev_ = t;
    v_prev_ = value;
    s_prev_ = slope;
    return total_;
  }

 private:
  bool started_ = false;
  double t_prev_ = 0.0;
  double v_prev_ = 0.0;
  double s_prev_ = 0.0;
  double total_ = 0.0;
};

inline Sample system_sample(const StructuredSystem& sys, const PhasePoint& pt, std::span<const Observable> observables,
                            double t) {
  const auto ss = sample(sys, pt);
  const auto v = tghs_velocity(ss);
  Sample out{.t = t, .state = pt};
  out.hamiltonian = ss.hamiltonian.value.real();
  out.sdyn = s_dynamics(ss);
  const auto& ds = ss.structural.grad;
  out.self_bracket = std::abs(gspb(ss.hamiltonian, ss.hamiltonian, ds));
  double worst = 0.0;
  for (std::size_t j = 0; j < v.dz.size(); ++j) worst = std::max(worst, std::abs(v.dzbar[j] - std::conj(v.dz[j])));
  out.conjugate_violation = worst;
  for (const auto& obs : observables) {
    const auto fs = sample(obs.field, pt);
    out.observables.push_back(fs.value);
    out.residuals.push_back(gspb(fs, ss.hamiltonian, ds));
  }
  return out;
}

inline std::vector<std::string> names(std::span<const Observable> observables) {
  std::vector<std::string> out;
  for (const auto& o : observables) out.push_back(o.name);
  return out;
}

inline void check_observables(std::size_t n, std::span<const Observable> observables) {
  for (const auto& o : observables)
    if (o.field.dimension() != 0 && o.field.dimension() != n)
      throw InputError("observable '" + o.name + "' has the wrong dimension");
}

}  // namespace detail

/// Integrates dz^j/dt = -2i DH/dzbar^j. The decay monitor is
/// |H(t) - H(0) exp(-int_0^t w)| with the corrected trapezoid rule over every step.
inline Trajectory integrate_tghs(const StructuredSystem& sys, const PhasePoint& z0, const StepperConfig& cfg,
                                 std::span<const Observable> observables = {}) {
  if (z0.dimension() != sys.dimension()) throw InputError("initial point has the wrong dimension");
  detail::check_observables(sys.dimension(), observables);
  Trajectory traj{sys.dimension(), detail::names(observables), {}};
  detail::RunningIntegral w_integral;
  double h0 = 0.0;

  auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    const auto v = tghs_real_velocity(sys, PhasePoint::from_coords(y));
    std::copy(v.begin(), v.end(), dy.begin());
  };
  auto observe = [&](double t, std::span<const double> y, bool record) {
    const auto pt = PhasePoint::from_coords(y);
    const auto flow = detail::flow_jacobian(sys, pt);
    const double integral = w_integral.add(t, flow.w, flow.dw_dt);
    if (!record) return;
    Sample s = detail::system_sample(sys, pt, observables, t);
    if (traj.samples.empty()) h0 = s.hamiltonian;
    s.decay_deviation = std::abs(s.hamiltonian - h0 * std::exp(-integral));
    traj.samples.push_back(std::move(s));
  };
  solve_ode(rhs, z0.coords(), cfg, observe);
  return traj;
}

/// Source of w for the equilibrium and perturbed flows: a constant w0 or a
/// system whose S-dynamics is evaluated along the flow.
using SDynamicsSource = std::variant<double, StructuredSystem>;

/// Integrates dz^j/dt = -z^j w + h_j(t, z). `perturbation` is empty, a single
/// field used for every j, or one field per j; fields may use t.
inline Trajectory integrate_perturbed(const SDynamicsSource& source, const ComplexCoords& z0,
                                      std::span<const Field> perturbation, const StepperConfig& cfg,
                                      std::span<const Observable> observables = {}) {
  const std::size_t n = z0.dimension();
  const StructuredSystem* sys = std::get_if<StructuredSystem>(&source);
  if (sys && sys->dimension() != n) throw InputError("initial point has the wrong dimension");
  if (!perturbation.empty() && perturbation.size() != 1 && perturbation.size() != n)
    throw InputError("perturbation needs 1 or n fields");
  for (const auto& h : perturbation)
    if (h.dimension() != 0 && h.dimension() != n) throw InputError("perturbation has the wrong dimension");
  detail::check_observables(n, observables);
  if (!sys && !observables.empty()) throw InputError("observables need a structured system");

  auto w_at = [&](const PhasePoint& pt) {
    return sys ? s_dynamics(*sys, pt) : std::get<double>(source);
  };

  Trajectory traj{n, detail::names(observables), {}};
  detail::RunningIntegral w_integral;
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    const auto pt = PhasePoint::from_coords(y);
    const double w = w_at(pt);
    for (std::size_t j = 0; j < n; ++j) {
      Complex zdot = -Complex(y[j], y[n + j]) * w;
      if (!perturbation.empty()) zdot += perturbation[perturbation.size() == 1 ? 0 : j](pt, t);
      dy[j] = zdot.real();
      dy[n + j] = zdot.imag();
    }
  };
  // dw/dt along the actual (not TGHS) flow, for the quadrature correction.
  std::vector<double> velocity(2 * n);
  auto w_and_slope = [&](double t, std::span<const double> y, const PhasePoint& pt) -> std::pair<double, double> {
    if (!sys) return {std::get<double>(source), 0.0};
    const auto flow = detail::flow_jacobian(*sys, pt);
    rhs(t, y, std::span<double>(velocity));
    double slope = 0.0;
    for (std::size_t a = 0; a < velocity.size(); ++a) slope += flow.dw[a] * velocity[a];
    return {flow.w, slope};
  };
  auto observe = [&](double t, std::span<const double> y, bool record) {
    const auto pt = PhasePoint::from_coords(y);
    const auto [w, slope] = w_and_slope(t, y, pt);
    const double integral = w_integral.add(t, w, slope);
    if (!record) return;
    Sample s = sys ? detail::system_sample(*sys, pt, observables, t) : Sample{.t = t, .state = pt};
    if (!sys) s.sdyn = std::get<double>(source);
    if (perturbation.empty()) {
      double worst = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(Complex(y[j], y[n + j]) - z0[j] * std::exp(-integral)));
      s.decay_deviation = worst;
    }
    traj.samples.push_back(std::move(s));
  };
  solve_ode(rhs, from_complex(z0).coords(), cfg, observe);
  return traj;
}

/// Covariant-equilibrium flow dz^j/dt = -z^j w.
inline Trajectory integrate_equilibrium(const SDynamicsSource& source, const ComplexCoords& z0,
                                        const StepperConfig& cfg, std::span<const Observable> observables = {}) {
  return integrate_perturbed(source, z0, {}, cfg, observables);
}

// ---------------------------------------------------------------------------
// Monitor summary

struct ObservableSummary {
  std::string name;
  double max_abs_residual = 0.0;
  double mean_abs_residual = 0.0;
  Complex final_value{};
};

struct MonitorSummary {
  std::size_t samples = 0;
  double t_final = 0.0;
  double max_self_bracket = std::numeric_limits<double>::quiet_NaN();
  double decay_law_max_dev = std::numeric_limits<double>::quiet_NaN();
  double max_conjugate_violation = std::numeric_limits<double>::quiet_NaN();
  double max_energy_drift = std::numeric_limits<double>::quiet_NaN();  // max |H(t) - H(0)|
  double w_min = std::numeric_limits<double>::quiet_NaN();
  double w_max = std::numeric_limits<double>::quiet_NaN();
  std::vector<ObservableSummary> observables;
};

namespace detail {

// NaN-skipping running max/min.
inline void fold_max(double& acc, double v) {
  if (std::isnan(v)) return;
  acc = std::isnan(acc) ? v : std::max(acc, v);
}
inline void fold_min(double& acc, double v) {
  if (std::isnan(v)) return;
  acc = std::isnan(acc) ? v : std::min(acc, v);
}

}  // namespace detail

inline MonitorSummary monitor_report(const Trajectory& traj) {
  if (traj.samples.empty()) throw std::invalid_argument("monitor_report needs a non-empty trajectory");
  MonitorSummary out;
  out.samples = traj.samples.size();
  out.t_final = traj.samples.back().t;
  const double h0 = traj.samples.front().hamiltonian;
  for (const auto& s : traj.samples) {
    detail::fold_max(out.max_self_bracket, s.self_bracket);
    detail::fold_max(out.decay_law_max_dev, s.decay_deviation);
    detail::fold_max(out.max_conjugate_violation, s.conjugate_violation);
    detail::fold_max(out.max_energy_drift, std::abs(s.hamiltonian - h0));
    detail::fold_min(out.w_min, s.sdyn);
    detail::fold_max(out.w_max, s.sdyn);
  }
  for (std::size_t k = 0; k < traj.observable_names.size(); ++k) {
    ObservableSummary o{traj.observable_names[k]};
    for (const auto& s : traj.samples) {
      const double r = std::abs(s.residuals.at(k));
      o.max_abs_residual = std::max(o.max_abs_residual, r);
      o.mean_abs_residual += r;
    }
    o.mean_abs_residual /= static_cast<double>(traj.samples.size());
    o.final_value = traj.samples.back().observables.at(k);
    out.observables.push_back(std::move(o));
  }
  return out;
}

}  // namespace gchs
