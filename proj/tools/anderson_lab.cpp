#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "anderson/config.hpp"
#include "anderson/parallel.hpp"
#include "anderson/runner.hpp"

namespace {

int run_command(const std::string& path, const anderson::ConfigOverrides& ov) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config " << path << '\n';
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    const auto cfg = anderson::parse_config(text.str(), ov);
    return anderson::run(cfg, std::cout, std::cerr);
  } catch (const anderson::ConfigError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and quadrature checks of eigenvalue counting "
               "bounds for the Anderson model"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t workers = 0;
  std::string csv;
  std::string json;
  run->add_option("config", config_path, "Config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  auto* samples_opt = run->add_option("--samples", samples, "Monte Carlo samples");
  auto* workers_opt = run->add_option("--workers", workers, "Worker threads");
  auto* csv_opt = run->add_option("--csv", csv, "CSV output path");
  auto* json_opt = run->add_option("--json", json, "JSON output path");

  auto* oracle = app.add_subcommand("oracle-suite",
                                    "Inertia counting and interlacing oracles");
  std::uint64_t oracle_seed = 20240601;
  std::size_t oracle_workers = anderson::default_workers();
  oracle->add_option("--seed", oracle_seed, "Seed");
  oracle->add_option("--workers", oracle_workers, "Worker threads");
  std::string oracle_csv;
  oracle->add_option("--csv", oracle_csv, "CSV output path");

  app.add_subcommand("list-experiments", "Print the experiment names");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    anderson::ConfigOverrides ov;
    if (*seed_opt) ov.seed = seed;
    if (*samples_opt) ov.samples = samples;
    if (*workers_opt) ov.workers = workers;
    if (*csv_opt) ov.csv = csv;
    if (*json_opt) ov.json = json;
    return run_command(config_path, ov);
  }
  if (oracle->parsed()) {
    const auto result = anderson::run_oracle_suite(oracle_seed, oracle_workers);
    for (const auto& r : result.rows) {
      std::cout << (r.pass ? "PASS " : "FAIL ") << r.experiment
                << " failures=" << r.lhs << '\n';
    }
    if (!oracle_csv.empty()) {
      std::ofstream f(oracle_csv);
      if (!f) {
        std::cerr << "error: cannot open " << oracle_csv << '\n';
        return 2;
      }
      f << anderson::checks_csv(result.rows);
    }
    return result.pass() ? 0 : 1;
  }
  for (const auto& name : anderson::experiment_names()) std::cout << name << '\n';
  return 0;
}
