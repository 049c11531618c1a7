#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anderson/estimators.hpp"
#include "anderson/interval.hpp"
#include "anderson/lattice.hpp"
#include "anderson/measures.hpp"

namespace anderson {

inline constexpr double kDefaultQMargin = 0.1;
inline constexpr std::int64_t kCoveringCap = 10'000'000;

/// Scales 2^(-j/4), j = 4..80, used to fit (alpha, U) for a plan.
std::vector<double> default_holder_scales();

struct MultiplicityPlan {
  Measure measure;
  HolderFit fit;
  std::size_t d;
  FreeOperator free;
  HalfOpenInterval window;
  /// floor(1/alpha) + 1.
  std::size_t n;
  double q;
  double margin;
  /// L_k = 2^k.
  std::vector<std::size_t> scales;

  /// L^-q.
  double cell(std::size_t scale) const;
  /// Exponent -(N alpha - 1) q + N d of L in the bound; n = 0 means N.
  double exponent(std::size_t n = 0) const;
  /// (|I| + 1) (2^alpha U)^N / N! L^exponent.
  double bound(std::size_t scale, std::size_t n = 0) const;
};

/// Fits (alpha, U) on default_holder_scales() and picks
/// q = N d / (N alpha - 1) * (1 + margin).
MultiplicityPlan plan_multiplicity(const Measure& measure, std::size_t d,
                                   const HalfOpenInterval& window,
                                   std::size_t k_min, std::size_t k_max,
                                   double margin = kDefaultQMargin,
                                   FreeOperator free = {FreeKind::adjacency,
                                                        Boundary::simple});

/// 2 (floor(|I| / (2h)) + 1).
std::int64_t covering_count(const HalfOpenInterval& window, double h);

/// The intervals ]a + k h, a + (k + 2) h], k < covering_count. Any J in I
/// with |J| <= h lies in one of them. Throws when there would be more than
/// kCoveringCap.
std::vector<HalfOpenInterval> covering(const HalfOpenInterval& window,
                                       double h);

/// True when some covering interval holds at least n eigenvalues of the
/// sorted spectrum.
bool covering_event(std::span<const double> sorted_spectrum,
                    const HalfOpenInterval& window, double h, std::size_t n);

/// Frequency of B_{L,I,q} on the box of side L against the plan's bound.
/// n_override = 0 keeps the plan's N.
BoundReport event_b_probability(const MultiplicityPlan& plan, std::size_t scale,
                                const MonteCarloConfig& mc,
                                std::size_t n_override = 0);

/// min_i spectrum[i + m - 1] - spectrum[i].
double min_cluster_gap(std::span<const double> sorted_spectrum, std::size_t m);

struct KsResult {
  double distance;
  double p_value;
};

/// Kolmogorov-Smirnov test against the unit exponential law.
KsResult ks_exponential(std::span<const double> values);

inline constexpr std::size_t kMinSpacings = 1000;

struct SpacingResult {
  std::vector<double> spacings;
  double ks_distance;
  double p_value;
  std::size_t eigenvalues;
};

/// Eigenvalues in the window, unfolded by the pooled empirical distribution
/// function, consecutive spacings rescaled to unit mean.
SpacingResult spacing_statistics(const Ensemble& ensemble,
                                 const HalfOpenInterval& window,
                                 const MonteCarloConfig& mc);

}  // namespace anderson
