#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "anderson/measures.hpp"

namespace anderson {

struct QuadratureOptions {
  /// Absolute tolerance for the whole integral.
  double tolerance = 1e-9;
  /// Maximal bisection depth per piece.
  int max_depth = 40;
  /// Uniform cells per smooth piece before adaptive refinement starts.
  int initial_cells = 32;
};

struct QuadratureResult {
  double value = 0.0;
  /// Error estimate accumulated on cells that hit max_depth unresolved.
  double residual = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Lebesgue integral of f over [lo, hi]; f may jump at `breakpoints` and is
/// smooth elsewhere (adaptive Simpson on each smooth piece).
QuadratureResult integrate_lebesgue(const Integrand& f, double lo, double hi,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options = {});

/// int f dmu. Densities are integrated piecewise against the Lebesgue
/// measure; the Cantor measure by refining its triadic construction.
QuadratureResult integrate_measure(const Measure& measure, const Integrand& f,
                                   std::span<const double> breakpoints,
                                   const QuadratureOptions& options = {});

}  // namespace anderson
