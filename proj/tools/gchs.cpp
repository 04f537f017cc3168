// gchs: scenario-driven front end for brackets, dynamics and integration.
//
//   gchs run [--jobs N] [--out-dir DIR] <scenario.json>
//   gchs bracket -f <expr> -g <expr> --at q1,p1,... <scenario.json>
//   gchs check --seed <u64> --count <n> <scenario.json>
//
// Exit codes: 0 success, 1 input/parse error, 2 runtime failure during
// integration, 3 invariant failure. GCHS_LOG={error,info,debug} sets verbosity.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "gchs/bridge.hpp"
#include "gchs/invariants.hpp"
#include "gchs/report.hpp"
#include "gchs/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitInvariant = 3;

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("gchs");
  logger->set_pattern("[gchs %l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GCHS_LOG")) {
    const std::string level(env);
    if (level == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (level == "info") {
      spdlog::set_level(spdlog::level::info);
    } else if (level == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else {
      spdlog::warn("ignoring GCHS_LOG={} (expected error, info or debug)", level);
    }
  }
}

// foo/run.csv -> foo/run_3.csv
std::string indexed_path(const std::string& path, std::size_t k, std::size_t total) {
  if (total == 1) return path;
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + std::to_string(k) + p.extension().string())).string();
}

std::string resolve(const std::string& out_dir, const std::string& path) {
  if (out_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(out_dir) / path).string();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gchs::InputError("cannot write '" + path + "'");
  out << contents;
}

struct RunResult {
  std::string csv;
  std::string json;
};

RunResult run_one(const gchs::CompiledScenario& compiled, const gchs::StepperConfig& cfg, std::size_t k) {
  spdlog::debug("integrating trajectory {}", k);
  const auto traj = gchs::integrate_tghs(compiled.system, compiled.initial[k], cfg, compiled.observables);
  std::ostringstream csv;
  gchs::write_csv(csv, traj);
  const auto summary = gchs::summary_to_json(gchs::monitor_report(traj));
  spdlog::info("trajectory {}: {} samples, decay_law_max_dev={}", k, traj.samples.size(),
               summary["decay_law_max_dev"].dump());
  return {csv.str(), summary.dump(2) + "\n"};
}

int cmd_run(const std::string& file, std::size_t jobs, const std::string& out_dir) {
  const auto sc = gchs::load_scenario(file);
  const auto compiled = gchs::compile(sc);
  const std::size_t total = compiled.initial.size();
  jobs = std::clamp<std::size_t>(jobs, 1, total);
  spdlog::info("running {} trajectories on {} workers", total, jobs);

  std::vector<RunResult> results(total);
  try {
    // Each worker takes every jobs-th initial condition.
    std::vector<std::future<void>> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t k = w; k < total; k += jobs) results[k] = run_one(compiled, sc.stepper, k);
      }));
    }
    for (auto& f : workers) f.get();
  } catch (const gchs::IntegrationError& e) {
    std::cerr << "error: integration failed: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const gchs::DomainError& e) {
    std::cerr << "error: evaluation failed during integration: " << e.what() << '\n';
    return kExitRuntime;
  }

  for (std::size_t k = 0; k < total; ++k) {
    if (!sc.outputs.csv.empty()) write_file(resolve(out_dir, indexed_path(sc.outputs.csv, k, total)), results[k].csv);
    if (!sc.outputs.json.empty()) {
      write_file(resolve(out_dir, indexed_path(sc.outputs.json, k, total)), results[k].json);
    } else {
      std::cout << results[k].json;
    }
  }
  return kExitOk;
}

gchs::PhasePoint parse_point(const std::string& text, std::size_t n) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw gchs::InputError("--at: '" + item + "' is not a number");
    }
  }
  if (values.size() != 2 * n)
    throw gchs::InputError("--at needs 2n=" + std::to_string(2 * n) + " values q1,p1,q2,p2,...");
  std::vector<double> q(n), p(n);
  for (std::size_t j = 0; j < n; ++j) {
    q[j] = values[2 * j];
    p[j] = values[2 * j + 1];
  }
  return gchs::PhasePoint(std::move(q), std::move(p));
}

int cmd_bracket(const std::string& f_text, const std::string& g_text, const std::string& at,
                const std::string& file) {
  const auto sc = gchs::load_scenario(file);
  const auto compiled = gchs::compile(sc);
  const auto f = gchs::compile_expression("-f", f_text, sc.n);
  const auto g = gchs::compile_expression("-g", g_text, sc.n);
  const auto pt = parse_point(at, sc.n);
  const auto& sys = compiled.system;
  std::cout << "pb_complex=" << gchs::format_complex(gchs::pb_complex(f, g, pt)) << '\n'
            << "geobracket=" << gchs::format_complex(gchs::geobracket(f, g, sys, pt)) << '\n'
            << "gspb=" << gchs::format_complex(gchs::gspb(f, g, sys, pt)) << '\n'
            << "gspb_real=" << gchs::format_complex(gchs::gspb_real(f, g, sys, pt)) << '\n';
  return kExitOk;
}

int cmd_check(const std::string& file, std::uint64_t seed, std::size_t count) {
  const auto sc = gchs::load_scenario(file);
  const auto compiled = gchs::compile(sc);
  gchs::SuiteOptions options;
  options.seed = seed;
  options.count = count;
  options.center = compiled.initial.front().coords();
  spdlog::info("checking invariants at {} points, seed {}", count, seed);
  const auto results = gchs::run_invariant_suite(compiled.system, compiled.observables, options);
  std::cout << gchs::format_invariant_report(results);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
  return ok ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Generalized structural Poisson brackets and covariant Hamiltonian flows"};
  app.require_subcommand(1);

  std::string file;
  std::size_t jobs = 1;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Integrate a scenario and write CSV/JSON reports");
  run->add_option("file", file, "Scenario JSON file")->required();
  run->add_option("--jobs", jobs, "Workers for ensembles of initial conditions")->check(CLI::PositiveNumber);
  run->add_option("--out-dir", out_dir, "Directory for relative output paths");

  std::string f_text, g_text, at;
  auto* bracket = app.add_subcommand("bracket", "Evaluate brackets of two expressions at a point");
  bracket->add_option("-f", f_text, "First expression")->required();
  bracket->add_option("-g", g_text, "Second expression")->required();
  bracket->add_option("--at", at, "Point as q1,p1,q2,p2,...")->required();
  bracket->add_option("file", file, "Scenario JSON file (supplies n, H and s)")->required();

  std::uint64_t seed = 42;
  std::size_t count = 1000;
  auto* check = app.add_subcommand("check", "Run the invariant suites at seeded random points");
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--count", count, "Number of random points")->check(CLI::PositiveNumber);
  check->add_option("file", file, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(file, jobs, out_dir);
    if (*bracket) return cmd_bracket(f_text, g_text, at, file);
    if (*check) return cmd_check(file, seed, count);
  } catch (const gchs::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const gchs::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const gchs::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const gchs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
