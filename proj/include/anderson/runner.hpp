#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "anderson/config.hpp"
#include "anderson/estimators.hpp"

namespace anderson {

/// Deterministic check: lhs <= rhs (up to the check's own tolerance).
struct CheckRow {
  std::string experiment;
  double lhs;
  double rhs;
  bool pass;
};

struct RunResult {
  std::vector<BoundReport> reports;
  std::vector<CheckRow> rows;
  /// Non-gating measurements (sweeps, fits, spacing statistics).
  nlohmann::json diagnostics = nlohmann::json::object();

  bool pass() const;
};

RunResult run_experiment(const ExperimentConfig& config);

/// Counting oracle (inertia against dense diagonalization on 200 random band
/// matrices, 10 intervals each) and 10^4 random interlacing checks.
RunResult run_oracle_suite(std::uint64_t seed, std::size_t workers);

inline constexpr const char* kReportHeader =
    "experiment,n,samples,empirical,ci_low,ci_high,bound,ratio,pass";
inline constexpr const char* kCheckHeader = "experiment,lhs,rhs,pass";

std::string reports_csv(const std::vector<BoundReport>& reports);
std::string checks_csv(const std::vector<CheckRow>& rows);

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const CheckRow& row);

/// Full JSON report: config echo, timestamp, rows, diagnostics.
nlohmann::json result_json(const ExperimentConfig& config,
                           const RunResult& result,
                           const std::string& timestamp);

/// Runs, prints one summary line per report to `out`, writes the CSV and
/// JSON files named in the config, and returns the exit status (0 iff every
/// report passes).
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace anderson
