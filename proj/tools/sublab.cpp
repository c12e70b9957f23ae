// sublab command line: run, sweep, check, catalog.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sublab/sublab.hpp"

namespace {

int do_run(const std::string& path, const std::string& output) {
  auto cfg = sublab::load_config(path);
  if (!output.empty()) cfg.output = output;
  auto r = sublab::execute_run(cfg);
  sublab::write_run(r, cfg.output);
  for (const auto& p : r.points) {
    std::cout << "n=" << p.n << " coupling=" << sublab::fmt(p.value);
    if (p.cls) std::cout << " " << sublab::to_string(p.cls->verdict) << " lambda_mu=" << sublab::fmt(p.cls->lambda_mu);
    if (!p.green_method.empty()) std::cout << " G=" << sublab::fmt(p.green);
    if (!p.wave_note.empty()) std::cout << " wave=" << p.wave_note.substr(0, p.wave_note.find(':'));
    for (auto& e : p.errors) std::cout << " error: " << e;
    std::cout << "\n";
  }
  for (const auto& f : r.families)
    if (f.cls) std::cout << "family coupling=" << sublab::fmt(f.value) << " " << sublab::to_string(f.cls->verdict) << "\n";
  std::cout << "report: " << (std::filesystem::path(cfg.output) / "report.txt").string() << "\n";
  return r.exit_code;
}

int do_sweep(const std::string& path, const std::string& axis, const std::string& output) {
  auto cfg = sublab::load_config(path);
  if (!output.empty()) cfg.output = output;
  auto r = sublab::execute_sweep(cfg, sublab::parse_axis(axis));
  std::filesystem::create_directories(cfg.output);
  auto file = std::filesystem::path(cfg.output) / ("sweep_" + axis + ".csv");
  std::ofstream(file) << r.csv;
  std::cout << r.csv << "csv: " << file.string() << "\n";
  return r.exit_code;
}

int do_check(std::uint64_t seed, const std::string& output) {
  auto results = sublab::run_battery(seed);
  bool ok = true;
  std::ostringstream csv;
  csv << "check,passed,worst,threshold\n";
  std::cout << "seed " << seed << "\n";
  for (const auto& c : results) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << sublab::fmt(c.worst)
              << " threshold=" << sublab::fmt(c.threshold) << (c.detail.empty() ? "" : " " + c.detail) << "\n";
    csv << c.name << "," << (c.passed ? "true" : "false") << "," << sublab::fmt(c.worst) << ","
        << sublab::fmt(c.threshold) << "\n";
    ok = ok && c.passed;
  }
  if (!output.empty()) {
    std::filesystem::create_directories(output);
    std::ofstream(std::filesystem::path(output) / "checks.csv") << csv.str();
  }
  return ok ? sublab::kExitOk : sublab::kExitViolation;
}

int do_catalog() {
  std::cout << "stable            beta in (0,2)\n"
               "compound_poisson  a, c\n"
               "gamma             a, c\n"
               "inverse_gaussian  a, c\n"
               "relativistic      alpha in (0,2), m\n"
               "log_power         delta, beta, sign = +1 | -1\n"
               "bessel\n"
               "bessel_squared\n"
               "linear            b\n\n";
  for (const auto& e : sublab::default_catalog()) std::cout << e.describe() << "\n";
  std::cout << sublab::catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", 1.0}}).describe() << "\n";
  return sublab::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subordinated Schrodinger forms on lattices"};
  app.require_subcommand(1);
  std::string config, axis, output;
  std::uint64_t seed = 20240601;

  auto* run = app.add_subcommand("run", "run every task of a config");
  run->add_option("config", config, "config file")->required();
  run->add_option("-o,--output", output, "output directory (overrides [run] output)");

  auto* sweep = app.add_subcommand("sweep", "evaluate one axis of a config, one CSV row per point");
  sweep->add_option("config", config, "config file")->required();
  sweep->add_option("--axis", axis, "lambda, size or beta")->required()->check(CLI::IsMember({"lambda", "size", "beta"}));
  sweep->add_option("-o,--output", output, "output directory");

  auto* check = app.add_subcommand("check", "full invariant battery");
  check->add_option("--seed", seed, "seed for the random instances");
  check->add_option("-o,--output", output, "write checks.csv here");

  app.add_subcommand("catalog", "list Bernstein function entries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : sublab::kExitUsage;
  }

  try {
    if (*run) return do_run(config, output);
    if (*sweep) return do_sweep(config, axis, output);
    if (*check) return do_check(seed, output);
    return do_catalog();
  } catch (const sublab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sublab::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sublab::kExitUsage;
  }
}
