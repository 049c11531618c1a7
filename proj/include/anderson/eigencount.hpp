#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anderson/interval.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

inline constexpr std::size_t kDefaultDenseCap = 2048;

/// Number of eigenvalues <= energy.
///
/// Factors H - energy = L D L^T without pivoting inside the band and counts
/// the negative pivots (Sylvester's law of inertia); bandwidth 1 reduces to
/// the Sturm sequence recurrence. If a pivot vanishes (energy numerically an
/// eigenvalue) the count is retried slightly above,
/// at energy + 2^-40 (|energy| + ||H||_inf), which realizes the "<=" convention.
std::size_t inertia_leq(const SymmetricBandMatrix& h, double energy);

/// tr P(]a, b]) = inertia_leq(b) - inertia_leq(a).
std::size_t count_in_interval(const SymmetricBandMatrix& h,
                              const HalfOpenInterval& interval);

/// Counts for several intervals, sharing factorizations of repeated
/// endpoints.
std::vector<std::size_t> count_in_intervals(
    const SymmetricBandMatrix& h, std::span<const HalfOpenInterval> intervals);

/// All eigenvalues in nondecreasing order (tridiagonal QL for bandwidth 1,
/// dense tridiagonalization plus implicit-shift QR otherwise).
std::vector<double> full_spectrum(const SymmetricBandMatrix& h,
                                  std::size_t dense_cap = kDefaultDenseCap);

struct InterlacingResult {
  std::size_t count_s;
  std::size_t count_t;
  bool holds;
};

/// Counts in `interval` with omega_site = s and omega_site = t (s <= t) and
/// checks count_s <= 1 + count_t.
InterlacingResult interlacing_check(const FiniteVolume& volume,
                                    const FreeOperator& free,
                                    std::span<const double> potential,
                                    std::size_t site, double s, double t,
                                    const HalfOpenInterval& interval);

InterlacingResult interlacing_check(const SymmetricBandMatrix& free_matrix,
                                    std::span<const double> potential,
                                    std::size_t site, double s, double t,
                                    const HalfOpenInterval& interval);

}  // namespace anderson
