#pragma once

// CSV trajectories and JSON monitor summaries. Numbers are written with 17
// significant digits, '.' decimal point, independent of the C++ locale.

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "gchs/integrate.hpp"

namespace gchs {

inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  std::array<char, 40> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

/// "re,im" with 17 significant digits each.
inline std::string format_complex(Complex c) { return format_number(c.real()) + "," + format_number(c.imag()); }

/// Header: t, q1..qn, p1..pn, H, w, <obs>_re, <obs>_im ..., res_<obs>_re, res_<obs>_im ...
inline void write_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.dimension;
  out << "t";
  for (std::size_t j = 1; j <= n; ++j) out << ",q" << j;
  for (std::size_t j = 1; j <= n; ++j) out << ",p" << j;
  out << ",H,w";
  for (const auto& name : traj.observable_names) out << ',' << name << "_re," << name << "_im";
  for (const auto& name : traj.observable_names) out << ",res_" << name << "_re,res_" << name << "_im";
  out << '\n';
  for (const auto& s : traj.samples) {
    out << format_number(s.t);
    for (double v : s.state.q()) out << ',' << format_number(v);
    for (double v : s.state.p()) out << ',' << format_number(v);
    out << ',' << format_number(s.hamiltonian) << ',' << format_number(s.sdyn);
    for (const auto& v : s.observables) out << ',' << format_complex(v);
    for (const auto& v : s.residuals) out << ',' << format_complex(v);
    out << '\n';
  }
}

namespace detail {

inline nlohmann::ordered_json json_number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json summary_to_json(const MonitorSummary& m) {
  using detail::json_number;
  nlohmann::ordered_json j;
  j["samples"] = m.samples;
  j["t_final"] = json_number(m.t_final);
  j["max_self_bracket"] = json_number(m.max_self_bracket);
  j["decay_law_max_dev"] = json_number(m.decay_law_max_dev);
  j["max_conjugate_violation"] = json_number(m.max_conjugate_violation);
  j["max_energy_drift"] = json_number(m.max_energy_drift);
  j["w_min"] = json_number(m.w_min);
  j["w_max"] = json_number(m.w_max);
  j["observables"] = nlohmann::ordered_json::array();
  for (const auto& o : m.observables) {
    nlohmann::ordered_json e;
    e["name"] = o.name;
    e["max_abs_residual"] = json_number(o.max_abs_residual);
    e["mean_abs_residual"] = json_number(o.mean_abs_residual);
    e["final_value"] = {json_number(o.final_value.real()), json_number(o.final_value.imag())};
    j["observables"].push_back(std::move(e));
  }
  return j;
}

}  // namespace gchs
