#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "anderson/eigencount.hpp"
#include "anderson/interval.hpp"
#include "anderson/lattice.hpp"
#include "anderson/parallel.hpp"
#include "anderson/rng.hpp"

namespace anderson {

struct MonteCarloConfig {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double confidence = 0.99;
  std::size_t workers = 1;
  /// Multiplies every theoretical bound. Test hook for the failure path;
  /// leave at 1.
  double bound_scale = 1.0;
};

/// Empirical mean of a bounded statistic against a theoretical upper bound.
/// The bound passes when the lower end of the two-sided Hoeffding interval
/// does not exceed it.
struct BoundReport {
  std::string experiment;
  std::size_t n = 1;
  std::size_t samples = 0;
  double empirical = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double range_cap = 0.0;
};

struct ConfidenceInterval {
  double low;
  double high;
};

/// R * sqrt(ln(2 / (1 - confidence)) / (2 n)).
double hoeffding_radius(std::size_t n, double range, double confidence);

/// mean -/+ hoeffding_radius for samples in [0, range].
ConfidenceInterval hoeffding_ci(std::span<const double> samples, double range,
                                double confidence);

/// Builds a report from per-sample values; the mean is accumulated in sample
/// order. The interval is clipped to [0, range].
BoundReport make_report(std::string experiment, std::size_t n,
                        std::span<const double> values, double range,
                        double bound, const MonteCarloConfig& mc);

/// The permutation sigma (0-based) with counts[sigma[0]] <= counts[sigma[1]]
/// <= ..., ties kept in index order.
std::vector<std::size_t> sigma_omega(std::span<const std::size_t> counts);

/// prod_k (sorted[k] - k); input must be nondecreasing.
std::int64_t falling_product(std::span<const std::size_t> sorted_counts);

/// sigma-ordered falling product of raw per-interval counts.
std::int64_t ordered_falling_product(std::span<const std::size_t> counts);

/// Runs fn(H, omega) for every sample index i with the potential drawn from
/// the counter stream (seed, i). Output order is the sample order whatever
/// the worker count.
template <class R, class Fn>
std::vector<R> map_samples(const Ensemble& ensemble, const MonteCarloConfig& mc,
                           Fn&& fn) {
  if (mc.samples == 0) {
    throw std::invalid_argument("Monte Carlo run needs at least one sample");
  }
  const SymmetricBandMatrix h0 = ensemble.free.matrix(ensemble.volume);
  std::vector<R> out(mc.samples);
  parallel_for(mc.samples, mc.workers, [&](std::size_t i) {
    RandomStream rng(mc.seed, i);
    const PotentialConfig omega = sample_potential(ensemble.measures, rng);
    const SymmetricBandMatrix h = assemble(h0, omega);
    out[i] = fn(h, omega);
  });
  return out;
}

/// tr P(I_k) for every sample and interval.
std::vector<std::vector<std::size_t>> sample_counts(
    const Ensemble& ensemble, std::span<const HalfOpenInterval> intervals,
    const MonteCarloConfig& mc);

/// If the family is a chain under inclusion, its indices ordered from the
/// smallest interval up (stable); otherwise nullopt.
std::optional<std::vector<std::size_t>> chain_order(
    std::span<const HalfOpenInterval> intervals);

BoundReport check_wegner(const Ensemble& ensemble,
                         const HalfOpenInterval& interval,
                         const MonteCarloConfig& mc);

struct MinamiPairResult {
  /// N1 N2 - min(N1, N2) against 2 Q(|I1|) Q(|I2|) |Lambda|^2.
  BoundReport general;
  /// For nested intervals (small one first): N_small (N_large - 1) against
  /// Q Q |Lambda|^2.
  std::optional<BoundReport> nested;
};

MinamiPairResult check_minami_pair(const Ensemble& ensemble,
                                   const HalfOpenInterval& first,
                                   const HalfOpenInterval& second,
                                   const MonteCarloConfig& mc);

inline constexpr std::size_t kDefaultIntervalCap = 5;

struct GeneralizedResult {
  /// Bound with M = n!, always valid.
  BoundReport factorial;
  /// Bound with M = 1, present for nested families.
  std::optional<BoundReport> nested;
  /// Distinct sigma_omega seen (0-based); its size is a certified lower
  /// bound on M(I_1, ..., I_n).
  std::set<std::vector<std::size_t>> observed_sigmas;
};

GeneralizedResult check_generalized(
    const Ensemble& ensemble, std::span<const HalfOpenInterval> intervals,
    const MonteCarloConfig& mc, std::size_t interval_cap = kDefaultIntervalCap);

enum class ProbabilityMode { single_n, staircase, pair_distance };

std::string to_string(ProbabilityMode mode);

/// single_n: P{N(I) >= n} against (Q(|I|) |Lambda|)^n / n!.
/// staircase: P{N(I_sigma(k)) >= k for all k} against M prod_k Q(|I_k|)
///   |Lambda|^n, with M = 1 for nested families and n! otherwise.
/// pair_distance: P{N(I1) >= 1, N(I2) >= 1} against
///   min(Q(|I1|), Q(|I2|)) Q(d + |I1| + |I2|) |Lambda|^2.
BoundReport check_probability(const Ensemble& ensemble,
                              std::span<const HalfOpenInterval> intervals,
                              ProbabilityMode mode, std::size_t n,
                              const MonteCarloConfig& mc);

enum class StatisticKind { wegner, minami, generalized };

struct TruncationPoint {
  double cutoff;
  double normalizer;
  BoundReport report;
  /// |E_{mu^(M)} - E_mu|.
  double difference;
  /// Sum of the two Hoeffding radii.
  double combined_radius;
};

struct TruncationResult {
  BoundReport baseline;
  std::vector<TruncationPoint> points;
};

/// The statistic under mu^(M) for each cutoff and under mu itself, all with
/// the same seed.
TruncationResult truncation_convergence(
    const Ensemble& ensemble, StatisticKind statistic,
    std::span<const HalfOpenInterval> intervals,
    std::span<const double> cutoffs, const MonteCarloConfig& mc);

std::int64_t factorial(std::size_t n);

}  // namespace anderson
