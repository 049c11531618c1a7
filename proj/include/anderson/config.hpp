#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anderson/estimators.hpp"
#include "anderson/interval.hpp"
#include "anderson/lattice.hpp"
#include "anderson/measures.hpp"

namespace anderson {

/// Experiment names accepted by `experiment = ...`.
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  std::string experiment;

  // Ensemble.
  std::size_t d = 1;
  std::vector<std::size_t> sides;
  FreeKind free = FreeKind::adjacency;
  Boundary boundary = Boundary::simple;
  std::string measure_text = "uniform(0,1)";
  std::vector<HalfOpenInterval> intervals;

  MonteCarloConfig mc;
  std::optional<std::string> csv;
  std::optional<std::string> json;

  // Experiment specific.
  std::vector<std::size_t> orders;  // n
  std::string mode = "all";
  std::string statistic = "wegner";
  std::vector<double> cutoffs{1.0, 2.0, 3.0, 4.0};
  std::vector<double> sweep;
  std::size_t interval_cap = kDefaultIntervalCap;
  std::size_t k_min = 3;
  std::size_t k_max = 5;
  double margin = 0.1;
  std::size_t model_size = 8;
  std::size_t interval_count = 50;
  std::vector<std::string> measures;
  std::vector<double> eps{0.2, 0.1, 0.05, 0.02, 0.01};
  std::vector<double> kappa{0.25, 0.5, 1.0, 2.0, 4.0};
  double energy = 0.1;
  std::size_t trials = 1000;
  double tolerance = 1e-9;
  int max_depth = 40;

  /// Accepted key/value pairs in file order, overrides applied; echoed into
  /// the JSON report.
  std::vector<std::pair<std::string, std::string>> echo;

  Measure measure() const;
  Ensemble ensemble() const;
};

struct ConfigIssue {
  std::size_t line;  // 0 when not tied to a line
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Command-line values that replace the file's.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> workers;
  std::optional<std::string> csv;
  std::optional<std::string> json;
};

/// Parses `key = value` lines (`#` starts a comment). Every problem found is
/// collected and thrown together as ConfigError.
ExperimentConfig parse_config(std::string_view text,
                              const ConfigOverrides& overrides = {});

/// `]a,b]` tokens separated by whitespace.
std::vector<HalfOpenInterval> parse_intervals(std::string_view text);

}  // namespace anderson
