#pragma once

// Seeded invariant suite over random points and random fields. Drives the
// `check` command; every invariant reports the largest deviation it saw.
//
// Deviations are scale-relative above magnitude 1: |a - b| / max(1, |a|, |b|).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gchs/brackets.hpp"
#include "gchs/bridge.hpp"
#include "gchs/derivatives.hpp"
#include "gchs/dynamics.hpp"
#include "gchs/field.hpp"
#include "gchs/integrate.hpp"
#include "gchs/parser.hpp"
#include "gchs/phasespace.hpp"
#include "gchs/random.hpp"
#include "gchs/testing/finite_difference.hpp"

namespace gchs {

struct InvariantResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;

  bool passed() const { return evaluated > 0 && max_deviation <= tolerance; }
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  std::size_t count = 1000;
  double radius = 1.0;
  std::vector<double> center;  // flat (q, p); empty means the origin
};

inline double scaled_deviation(Complex a, Complex b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

class InvariantTally {
 public:
  /// Runs one probe; DomainError skips the point, any other library error fails it.
  void probe(const std::string& name, double tolerance, const std::function<double()>& fn) {
    auto& r = entry(name, tolerance);
    try {
      const double dev = fn();
      r.max_deviation = std::isnan(dev) ? std::numeric_limits<double>::infinity() : std::max(r.max_deviation, dev);
      ++r.evaluated;
    } catch (const DomainError&) {
      ++r.skipped;
    } catch (const Error&) {
      r.max_deviation = std::numeric_limits<double>::infinity();
      ++r.evaluated;
    }
  }

  std::vector<InvariantResult> results() const { return results_; }

 private:
  InvariantResult& entry(const std::string& name, double tolerance) {
    for (auto& r : results_)
      if (r.name == name) return r;
    results_.push_back({name, 0.0, tolerance, 0, 0});
    return results_.back();
  }

  std::vector<InvariantResult> results_;
};

inline double max_scaled(std::span<const Complex> a, std::span<const Complex> b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, scaled_deviation(a[k], b[k]));
  return worst;
}

// Error of the fixed-step RK4 oscillator run against exp(-it) z0.
inline double oscillator_error(double step) {
  const Field q = Field::q(1, 0), p = Field::p(1, 0);
  const StructuredSystem osc(1, (q * q + p * p) / Field(2.0), Field(0.0));
  StepperConfig cfg;
  cfg.step = step;
  cfg.t_end = std::acos(-1.0);
  const auto traj = integrate_tghs(osc, PhasePoint({1.0}, {0.0}), cfg);
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const Complex exact = std::exp(-imaginary_unit * s.t);
    worst = std::max(worst, std::abs(Complex(s.state.q(0), s.state.p(0)) - exact));
  }
  return worst;
}

}  // namespace detail

inline std::vector<InvariantResult> run_invariant_suite(const StructuredSystem& sys,
                                                        std::span<const Observable> observables,
                                                        const SuiteOptions& options) {
  const std::size_t n = sys.dimension();
  if (!options.center.empty() && options.center.size() != 2 * n)
    throw InputError("suite center has the wrong dimension");
  Rng rng(options.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  detail::InvariantTally tally;
  const Field& H = sys.hamiltonian();
  const Field& s = sys.structural();
  const StructuredSystem classical(n, H, Field(0.0));

  std::vector<Field> named{H, s};
  for (const auto& o : observables) named.push_back(o.field);

  for (std::size_t k = 0; k < options.count; ++k) {
    const PhasePoint pt = random_point(n, rng, options.radius, options.center);
    const Field f = random_polynomial(n, rng);
    const Field g = random_polynomial(n, rng);
    const Field h = random_complex_polynomial(n, rng);
    const Field smooth = random_smooth_field(n, rng);
    const double a = coeff(rng);
    const double b = coeff(rng);
    const std::vector<Field> fields{H, s, f, h, smooth};

    // phasespace
    tally.probe("phasespace.complex_round_trip", 0.0, [&] {
      const auto back = from_complex(to_complex(pt));
      double worst = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max({worst, std::abs(back.q(j) - pt.q(j)), std::abs(back.p(j) - pt.p(j))});
      return worst;
    });
    tally.probe("phasespace.wirtinger_inversion", 1e-14, [&] {
      double worst = 0.0;
      for (const auto& fld : fields) {
        const auto jet = real_jet(fld, pt);
        for (std::size_t j = 0; j < n; ++j) {
          const auto w = wirtinger_from_real(jet.dq(j), jet.dp(j));
          const auto r = real_from_wirtinger(w.dz, w.dzbar);
          worst = std::max({worst, scaled_deviation(r.dq, jet.dq(j)), scaled_deviation(r.dp, jet.dp(j))});
        }
      }
      return worst;
    });
    tally.probe("phasespace.conjugation_symmetry", 1e-14, [&] {
      double worst = 0.0;
      for (const auto& fld : {H, s, f, smooth}) {
        const auto grad = gradient(fld, pt);
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, scaled_deviation(grad.dzbar[j], std::conj(grad.dz[j])));
      }
      return worst;
    });

    // fields
    tally.probe("fields.first_partials_vs_central_differences", 1e-6, [&] {
      double worst = 0.0;
      for (const auto& fld : fields) {
        const auto ad = real_jet(fld, pt).partials;
        const auto fd = testing::central_gradient(fld, pt, 1e-5);
        for (std::size_t c = 0; c < ad.size(); ++c)
          worst = std::max(worst, std::abs(ad[c] - fd[c]) / std::max(1.0, std::abs(ad[c])));
      }
      return worst;
    });
    tally.probe("fields.second_partials_vs_finite_differences", 1e-4, [&] {
      double worst = 0.0;
      for (const auto& fld : fields) {
        const auto ad = second_derivatives(fld, pt);
        const auto fd = testing::central_hessian(fld, pt, 1e-4);
        const std::size_t m = ad.size();
        for (std::size_t c = 0; c < m * m; ++c) {
          const Complex v = ad(c / m, c % m);
          worst = std::max(worst, std::abs(v - fd[c]) / std::max(1.0, std::abs(v)));
        }
      }
      return worst;
    });
    tally.probe("fields.derivative_linearity", 1e-14, [&] {
      const auto lhs = gradient(Field(a) * f + Field(b) * g, pt);
      const auto gf = gradient(f, pt);
      const auto gg = gradient(g, pt);
      double worst = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double scale = std::max(1.0, std::abs(a * gf.dz[j]) + std::abs(b * gg.dz[j]));
        worst = std::max(worst, std::abs(lhs.dz[j] - (a * gf.dz[j] + b * gg.dz[j])) / scale);
        const double scale_bar = std::max(1.0, std::abs(a * gf.dzbar[j]) + std::abs(b * gg.dzbar[j]));
        worst = std::max(worst, std::abs(lhs.dzbar[j] - (a * gf.dzbar[j] + b * gg.dzbar[j])) / scale_bar);
      }
      return worst;
    });
    tally.probe("fields.real_fields_evaluate_real", 1e-14, [&] {
      double worst = 0.0;
      for (const auto& fld : {H, s, f, smooth}) {
        const Complex v = fld(pt);
        worst = std::max(worst, std::abs(v.imag()) / std::max(1.0, std::abs(v.real())));
      }
      return worst;
    });
    tally.probe("fields.parse_print_round_trip", 1e-14, [&] {
      double worst = 0.0;
      for (const auto& fld : named) worst = std::max(worst, scaled_deviation(fld(pt), parse_field(fld.to_string(), n)(pt)));
      for (const auto& fld : fields) worst = std::max(worst, scaled_deviation(fld(pt), parse_field(fld.to_string(), n)(pt)));
      return worst;
    });

    // brackets
    tally.probe("brackets.gspb_antisymmetry", 1e-12, [&] {
      return std::max(scaled_deviation(gspb(f, g, sys, pt), -gspb(g, f, sys, pt)),
                      scaled_deviation(gspb(h, H, sys, pt), -gspb(H, h, sys, pt)));
    });
    tally.probe("brackets.bilinearity", 1e-12, [&] {
      const Field combo = Field(a) * f + Field(b) * g;
      const double d1 = scaled_deviation(gspb(combo, h, sys, pt), a * gspb(f, h, sys, pt) + b * gspb(g, h, sys, pt));
      const double d2 = scaled_deviation(geobracket(combo, h, sys, pt),
                                         a * geobracket(f, h, sys, pt) + b * geobracket(g, h, sys, pt));
      return std::max(d1, d2);
    });
    tally.probe("brackets.classical_reduction", 0.0, [&] {
      return std::max(std::abs(gspb(f, g, classical, pt) - pb_complex(f, g, pt)),
                      std::abs(gspb(h, H, classical, pt) - pb_complex(h, H, pt)));
    });
    tally.probe("brackets.real_complex_pb_agreement", 1e-10, [&] {
      return std::max(scaled_deviation(pb_complex(f, g, pt), pb_real(f, g, pt)),
                      scaled_deviation(pb_complex(h, H, pt), pb_real(h, H, pt)));
    });
    tally.probe("brackets.structural_form_vs_definition", 1e-10, [&] {
      const Complex def = pb_complex(f, g, pt) + geobracket(f, g, sys, pt);
      return scaled_deviation(def, gspb_structural_form(f, g, sys, pt));
    });
    tally.probe("brackets.coordinate_brackets", 1e-12, [&] {
      const auto ds = gradient(s, pt);
      const auto zc = to_complex(pt);
      double worst = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const Field z = Field::z(n, j), zb = Field::zbar(n, j);
        worst = std::max(worst, std::abs(gspb(z, z, sys, pt)));
        worst = std::max(worst, std::abs(gspb(zb, zb, sys, pt)));
        worst = std::max(worst, std::abs(pb_complex(z, zb, pt) - Complex(0.0, -2.0)));
        const Complex expected = -2.0 * imaginary_unit * (1.0 + zc[j] * ds.dz[j] + std::conj(zc[j]) * ds.dzbar[j]);
        worst = std::max(worst, scaled_deviation(gspb(z, zb, sys, pt), expected));
      }
      return worst;
    });
    tally.probe("brackets.geometrio_vs_direct_brackets", 1e-12, [&] {
      const auto geo = geometrio(sys, pt);
      double worst = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        worst = std::max(worst, scaled_deviation(geo.with_z[j], pb_complex(s, Field::z(n, j), pt)));
        worst = std::max(worst, scaled_deviation(geo.with_zbar[j], pb_complex(s, Field::zbar(n, j), pt)));
      }
      return worst;
    });

    // dynamics
    tally.probe("dynamics.decomposition", 1e-10, [&] {
      double worst = 0.0;
      for (const auto& fld : {f, h}) {
        const Complex total = gspb(fld, H, sys, pt);
        worst = std::max(worst, scaled_deviation(total, thorough_rate(fld, sys, pt) + fld(pt) * s_dynamics(sys, pt)));
      }
      return worst;
    });
    tally.probe("dynamics.covariant_conservation", 1e-10, [&] {
      const auto ss = sample(sys, pt);
      const auto dh = structural_derivative(ss.hamiltonian.value, ss.hamiltonian.grad, ss.structural.grad);
      const Complex chain = chain_rule_rate(dh, tghs_velocity(ss));
      return std::max(std::abs(gspb(H, H, sys, pt)), std::abs(chain) / std::max(1.0, std::abs(ss.hamiltonian.value)));
    });
    tally.probe("dynamics.velocity_identity", 1e-10, [&] {
      const auto ss = sample(sys, pt);
      const auto dh = structural_derivative(ss.hamiltonian.value, ss.hamiltonian.grad, ss.structural.grad);
      const auto v = tghs_velocity(ss);
      Complex lhs{}, rhs{};
      for (std::size_t j = 0; j < n; ++j) {
        lhs += v.dz[j] * dh.dz[j];
        rhs -= v.dzbar[j] * dh.dzbar[j];
      }
      return scaled_deviation(lhs, rhs);
    });
    tally.probe("dynamics.conjugate_pairing", 1e-12, [&] {
      const auto v = tghs_velocity(sys, pt);
      double worst = 0.0;
      for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, scaled_deviation(v.dzbar[j], std::conj(v.dz[j])));
      return worst;
    });
    tally.probe("dynamics.structural_self_bracket", 1e-10, [&] {
      return scaled_deviation(gspb(s, H, sys, pt), (1.0 + s(pt)) * s_dynamics(sys, pt));
    });
    tally.probe("dynamics.acceleration_consistency", 1e-8, [&] {
      double worst = 0.0;
      for (const auto& fld : {f, smooth}) {
        worst = std::max(worst, scaled_deviation(covariant_acceleration(fld, sys, pt),
                                                 covariant_acceleration_nested(fld, sys, pt)));
      }
      return worst;
    });
    tally.probe("dynamics.s_dynamics_chain_rule", 1e-10, [&] {
      const auto ss = sample(sys, pt);
      return scaled_deviation(s_dynamics(ss), chain_rule_rate(ss.structural.grad, tghs_velocity(ss)));
    });

    // bridge
    tally.probe("bridge.gspb_real_vs_complex", 1e-10, [&] {
      return std::max(scaled_deviation(gspb(f, g, sys, pt), gspb_real(f, g, sys, pt)),
                      scaled_deviation(gspb(h, H, sys, pt), gspb_real(h, H, sys, pt)));
    });
    tally.probe("bridge.rate_real_vs_complex", 1e-10, [&] {
      double worst = 0.0;
      for (const auto& fld : {f, h}) {
        const auto c = gchs_rate(fld, sys, pt);
        const auto r = gchs_real_rate(fld, sys, pt);
        worst = std::max({worst, scaled_deviation(c.total, r.total), scaled_deviation(c.thorough, r.thorough)});
      }
      return worst;
    });
    tally.probe("bridge.w_real_vs_complex", 1e-10, [&] {
      return scaled_deviation(s_dynamics(sys, pt), gchs_real_rate(H, sys, pt).sdyn);
    });
  }

  // integrate: trajectory-level checks (independent of count).
  tally.probe("integrate.rk4_order_ratio_in_[12,20]", 0.0, [&] {
    const double ratio = detail::oscillator_error(0.1) / detail::oscillator_error(0.05);
    return (ratio >= 12.0 && ratio <= 20.0) ? 0.0 : std::abs(ratio - 16.0);
  });

  const PhasePoint start = options.center.empty() ? PhasePoint(std::vector<double>(n, 0.5), std::vector<double>(n, 0.5))
                                                  : PhasePoint::from_coords(options.center);
  std::vector<Observable> monitored(observables.begin(), observables.end());
  monitored.push_back({"H", H});
  monitored.push_back({"s", s});
  for (std::size_t j = 0; j < n; ++j) monitored.push_back({"z" + std::to_string(j + 1), Field::z(n, j)});
  StepperConfig short_run;
  short_run.step = 1e-3;
  short_run.t_end = 0.05;

  auto along_flow = [&](bool covariant) {
    const auto traj = integrate_tghs(sys, start, short_run, monitored);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.samples.size(); ++k) {
      const auto& prev = traj.samples[k - 1];
      const auto& next = traj.samples[k + 1];
      const auto& mid = traj.samples[k];
      for (std::size_t o = 0; o < monitored.size(); ++o) {
        const Complex diff = (next.observables[o] - prev.observables[o]) / (next.t - prev.t);
        const Complex expected = covariant ? gchs_rate(monitored[o].field, sys, mid.state).total
                                           : thorough_rate(monitored[o].field, sys, mid.state);
        const Complex measured = covariant ? diff + mid.observables[o] * mid.sdyn : diff;
        worst = std::max(worst, scaled_deviation(measured, expected));
      }
    }
    return worst;
  };
  tally.probe("integrate.finite_difference_consistency", 1e-4, [&] { return along_flow(false); });
  tally.probe("integrate.covariant_derivative_along_flow", 1e-4, [&] { return along_flow(true); });

  return tally.results();
}

/// One line per invariant; stable across runs for a fixed seed.
inline std::string format_invariant_report(const std::vector<InvariantResult>& results) {
  std::string out;
  char line[256];
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed()) ++failed;
    std::snprintf(line, sizeof line, "%s %-48s max_dev=%.6e tol=%.1e evaluated=%zu skipped=%zu\n",
                  r.passed() ? "PASS" : "FAIL", r.name.c_str(), r.max_deviation, r.tolerance, r.evaluated, r.skipped);
    out += line;
  }
  std::snprintf(line, sizeof line, "%zu/%zu invariants passed\n", results.size() - failed, results.size());
  out += line;
  return out;
}

}  // namespace gchs
