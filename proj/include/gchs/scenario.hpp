#pragma once

// JSON scenario files for the command-line front end.
//
//   {
//     "n": 1,
//     "hamiltonian": "(q1^2 + p1^2)/2",
//     "structural": "q1",
//     "observables": {"z": "z1"},
//     "initial": {"q": [1], "p": [2]},          // or an array of such objects
//     "stepper": {"method": "rk4", "step": 1e-3, "t_end": 2, "stride": 10},
//     "outputs": {"csv": "run.csv", "json": "run.json"}
//   }
//
// Unknown keys are rejected.

#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gchs/brackets.hpp"
#include "gchs/errors.hpp"
#include "gchs/integrate.hpp"
#include "gchs/parser.hpp"

namespace gchs {

/// Malformed scenario: bad JSON, unknown or missing keys, bad expressions.
class ScenarioError : public InputError {
 public:
  using InputError::InputError;
};

struct InitialCondition {
  std::vector<double> q;
  std::vector<double> p;
};

struct OutputPaths {
  std::string csv;
  std::string json;
};

struct Scenario {
  std::size_t n = 0;
  std::string hamiltonian;
  std::string structural;
  std::vector<std::pair<std::string, std::string>> observables;  // name, expression
  std::vector<InitialCondition> initial;
  StepperConfig stepper;
  OutputPaths outputs;
};

/// Parsed expressions ready for evaluation.
struct CompiledScenario {
  StructuredSystem system;
  std::vector<Observable> observables;
  std::vector<PhasePoint> initial;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline void reject_unknown(const ojson& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ScenarioError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ScenarioError("unknown field '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const ojson& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    if (!obj.contains(key)) throw ScenarioError("missing field '" + std::string(key) + "' in " + where);
    throw ScenarioError("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

inline InitialCondition parse_initial(const ojson& obj, std::size_t n, const std::string& where) {
  reject_unknown(obj, where, {"q", "p"});
  InitialCondition ic{get_as<std::vector<double>>(obj, "q", where), get_as<std::vector<double>>(obj, "p", where)};
  if (ic.q.size() != n || ic.p.size() != n)
    throw ScenarioError(where + ": q and p must each have n=" + std::to_string(n) + " entries");
  return ic;
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::ordered_json& doc) {
  using detail::get_as;
  detail::reject_unknown(doc, "scenario",
                         {"n", "hamiltonian", "structural", "observables", "initial", "stepper", "outputs"});
  Scenario sc;
  const auto n = get_as<long long>(doc, "n", "scenario");
  if (n < 1) throw ScenarioError("n must be a positive integer");
  sc.n = static_cast<std::size_t>(n);
  sc.hamiltonian = get_as<std::string>(doc, "hamiltonian", "scenario");
  sc.structural = get_as<std::string>(doc, "structural", "scenario");

  if (doc.contains("observables")) {
    const auto& obs = doc.at("observables");
    if (!obs.is_object()) throw ScenarioError("observables must be an object of name: expression");
    for (const auto& [name, expr] : obs.items()) {
      if (!expr.is_string()) throw ScenarioError("observable '" + name + "' must be an expression string");
      sc.observables.emplace_back(name, expr.get<std::string>());
    }
  }

  if (!doc.contains("initial")) throw ScenarioError("missing field 'initial' in scenario");
  const auto& init = doc.at("initial");
  if (init.is_array()) {
    if (init.empty()) throw ScenarioError("initial must not be empty");
    for (std::size_t k = 0; k < init.size(); ++k)
      sc.initial.push_back(detail::parse_initial(init[k], sc.n, "initial[" + std::to_string(k) + "]"));
  } else {
    sc.initial.push_back(detail::parse_initial(init, sc.n, "initial"));
  }

  if (!doc.contains("stepper")) throw ScenarioError("missing field 'stepper' in scenario");
  const auto& st = doc.at("stepper");
  detail::reject_unknown(st, "stepper", {"method", "step", "abs_tol", "rel_tol", "t_end", "stride", "blowup_norm"});
  if (st.contains("method")) {
    const auto method = get_as<std::string>(st, "method", "stepper");
    if (method == "rk4") {
      sc.stepper.method = StepMethod::rk4;
    } else if (method == "rk45") {
      sc.stepper.method = StepMethod::rk45;
    } else {
      throw ScenarioError("stepper.method must be \"rk4\" or \"rk45\"");
    }
  }
  sc.stepper.t_end = get_as<double>(st, "t_end", "stepper");
  if (st.contains("step")) sc.stepper.step = get_as<double>(st, "step", "stepper");
  if (st.contains("abs_tol")) sc.stepper.abs_tol = get_as<double>(st, "abs_tol", "stepper");
  if (st.contains("rel_tol")) sc.stepper.rel_tol = get_as<double>(st, "rel_tol", "stepper");
  if (st.contains("blowup_norm")) sc.stepper.blowup_norm = get_as<double>(st, "blowup_norm", "stepper");
  if (st.contains("stride")) {
    const auto stride = get_as<long long>(st, "stride", "stepper");
    if (stride < 1) throw ScenarioError("stepper.stride must be >= 1");
    sc.stepper.stride = static_cast<std::size_t>(stride);
  }
  try {
    sc.stepper.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("stepper: ") + e.what());
  }

  if (doc.contains("outputs")) {
    const auto& out = doc.at("outputs");
    detail::reject_unknown(out, "outputs", {"csv", "json"});
    if (out.contains("csv")) sc.outputs.csv = get_as<std::string>(out, "csv", "outputs");
    if (out.contains("json")) sc.outputs.json = get_as<std::string>(out, "json", "outputs");
  }
  return sc;
}

/// Reads and validates a scenario file. JSON syntax errors name line and column.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return parse_scenario(doc);
}

/// Parses one expression of the scenario, prefixing errors with the field name.
inline Field compile_expression(const std::string& role, const std::string& text, std::size_t n,
                                ParseOptions options = {}) {
  try {
    return parse_field(text, n, options);
  } catch (const ParseError& e) {
    throw ScenarioError(role + " \"" + text + "\": " + e.what());
  }
}

inline CompiledScenario compile(const Scenario& sc) {
  Field h = compile_expression("hamiltonian", sc.hamiltonian, sc.n);
  Field s = compile_expression("structural", sc.structural, sc.n);
  CompiledScenario out{StructuredSystem(sc.n, std::move(h), std::move(s)), {}, {}};
  for (const auto& [name, expr] : sc.observables)
    out.observables.push_back({name, compile_expression("observable '" + name + "'", expr, sc.n)});
  for (const auto& ic : sc.initial) {
    try {
      out.initial.emplace_back(ic.q, ic.p);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("initial: ") + e.what());
    }
  }
  return out;
}

}  // namespace gchs
