#include "anderson/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace anderson {

namespace {

// Gaussian mass beyond 12 standard deviations is below 1e-32.
constexpr double kGaussianReach = 12.0;

struct Simpson {
  const Integrand& f;
  const QuadratureOptions& options;
  QuadratureResult& result;

  double eval(double x) {
    ++result.evaluations;
    return f(x);
  }

  double refine(double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= options.max_depth) {
      result.residual += std::abs(delta);
      return left + right;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  // One smooth piece; endpoints are nudged inward because f may jump there.
  double piece(double lo, double hi, double tol) {
    if (!(hi > lo)) return 0.0;
    const int cells = std::max(1, options.initial_cells);
    const double width = (hi - lo) / cells;
    const double nudge = 1e-12 * (hi - lo);
    double total = 0.0;
    double a = lo;
    double fa = eval(lo + nudge);
    for (int c = 0; c < cells; ++c) {
      const double b = (c + 1 == cells) ? hi : lo + (c + 1) * width;
      const double fb = eval(c + 1 == cells ? hi - nudge : b);
      const double fm = eval(0.5 * (a + b));
      const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
      total += refine(a, b, fa, fm, fb, whole, tol / cells, 0);
      a = b;
      fa = fb;
    }
    return total;
  }
};

std::vector<double> cut_points(double lo, double hi,
                               std::span<const double> breakpoints) {
  std::vector<double> cuts{lo, hi};
  for (double x : breakpoints) {
    if (std::isfinite(x) && lo < x && x < hi) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

struct Segment {
  double lo;
  double hi;
};

// Pieces on which the density of `measure` is smooth.
std::vector<Segment> density_segments(const Measure& measure) {
  std::vector<Segment> out;
  const auto add_pwc = [&out](const PiecewiseConstant& p) {
    for (std::size_t k = 0; k < p.heights.size(); ++k) {
      if (p.heights[k] > 0.0) out.push_back({p.breaks[k], p.breaks[k + 1]});
    }
  };
  const auto& fam = measure.family();
  if (const auto* u = std::get_if<Uniform>(&fam)) {
    out.push_back({u->lo, u->hi});
  } else if (const auto* p = std::get_if<PiecewiseConstant>(&fam)) {
    add_pwc(*p);
  } else if (const auto* g = std::get_if<Gaussian>(&fam)) {
    out.push_back({g->mean - kGaussianReach * g->stddev,
                   g->mean + kGaussianReach * g->stddev});
  } else if (const auto* t = std::get_if<Truncated>(&fam)) {
    if (t->restricted) {
      add_pwc(*t->restricted);
    } else if (const auto* ig = std::get_if<Gaussian>(&t->inner->family())) {
      const double lo =
          std::max(-t->cutoff, ig->mean - kGaussianReach * ig->stddev);
      const double hi =
          std::min(t->cutoff, ig->mean + kGaussianReach * ig->stddev);
      if (lo < hi) out.push_back({lo, hi});
    }
  }
  return out;
}

struct CantorRefiner {
  const Integrand& f;
  const QuadratureOptions& options;
  std::span<const double> breakpoints;
  double cutoff;  // mass outside [-cutoff, cutoff] is discarded
  QuadratureResult& result;

  double eval(double x) {
    ++result.evaluations;
    return f(x);
  }

  bool has_breakpoint(double lo, double hi) const {
    return std::any_of(breakpoints.begin(), breakpoints.end(),
                       [&](double x) { return lo <= x && x <= hi; });
  }

  // Four-point rule on the Cantor piece [lo, lo + len] carrying `mass`;
  // exact for affine f.
  double estimate(double lo, double len, double mass) {
    const double third = len / 3.0;
    return 0.25 * mass *
           (eval(lo) + eval(lo + third) + eval(lo + 2.0 * third) + eval(lo + len));
  }

  // Integral over the Cantor piece [lo, lo + len]. `whole` is the four-point
  // estimate of the piece, or NaN when it has not been computed.
  double piece(double lo, double len, double mass, double tol, int depth,
               double whole) {
    const double hi = lo + len;
    if (lo > cutoff) return 0.0;
    const bool straddles = hi > cutoff;
    const double third = len / 3.0;
    const double half = 0.5 * mass;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (depth < 3 || straddles || has_breakpoint(lo, hi) || std::isnan(whole)) {
      if (depth >= options.max_depth) {
        const double f0 = eval(lo);
        if (straddles) {
          result.residual += half * std::abs(f0);
          return half * f0;
        }
        const double f1 = eval(hi);
        result.residual += half * std::abs(f1 - f0);
        return half * (f0 + f1);
      }
      const bool forced = depth < 3 || straddles || has_breakpoint(lo, hi);
      if (forced) {
        return piece(lo, third, half, 0.5 * tol, depth + 1, nan) +
               piece(lo + 2.0 * third, third, half, 0.5 * tol, depth + 1, nan);
      }
      whole = estimate(lo, len, mass);
    }
    const double left = estimate(lo, third, half);
    const double right = estimate(lo + 2.0 * third, third, half);
    const double error = std::abs(left + right - whole);
    if (error <= tol || depth >= options.max_depth) {
      if (error > tol) result.residual += error;
      return left + right;
    }
    return piece(lo, third, half, 0.5 * tol, depth + 1, left) +
           piece(lo + 2.0 * third, third, half, 0.5 * tol, depth + 1, right);
  }
};

}  // namespace

QuadratureResult integrate_lebesgue(const Integrand& f, double lo, double hi,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("integrate_lebesgue: need finite lo <= hi");
  }
  QuadratureResult result;
  Simpson simpson{f, options, result};
  const auto cuts = cut_points(lo, hi, breakpoints);
  const double total = hi - lo;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double share = total > 0.0 ? (cuts[k + 1] - cuts[k]) / total : 1.0;
    result.value += simpson.piece(cuts[k], cuts[k + 1], options.tolerance * share);
  }
  result.converged = result.residual <= options.tolerance;
  return result;
}

QuadratureResult integrate_measure(const Measure& measure, const Integrand& f,
                                   std::span<const double> breakpoints,
                                   const QuadratureOptions& options) {
  const auto& fam = measure.family();
  const Cantor* cantor = std::get_if<Cantor>(&fam);
  double cutoff = std::numeric_limits<double>::infinity();
  double normalizer = 1.0;
  if (const auto* t = std::get_if<Truncated>(&fam)) {
    if (std::holds_alternative<Cantor>(t->inner->family())) {
      cantor = &std::get<Cantor>(t->inner->family());
      cutoff = t->cutoff;
      normalizer = t->normalizer;
    }
  }
  if (cantor) {
    QuadratureResult result;
    CantorRefiner refiner{f, options, breakpoints, cutoff, result};
    result.value =
        normalizer * refiner.piece(0.0, 1.0, 1.0, options.tolerance / normalizer,
                                   0, std::numeric_limits<double>::quiet_NaN());
    result.residual *= normalizer;
    result.converged = result.residual <= options.tolerance;
    return result;
  }

  const auto segments = density_segments(measure);
  if (segments.empty()) {
    throw std::logic_error("integrate_measure: no density segments");
  }
  double total = 0.0;
  for (const auto& s : segments) total += s.hi - s.lo;
  QuadratureResult result;
  const Integrand weighted = [&](double x) { return f(x) * measure.density(x); };
  for (const auto& s : segments) {
    QuadratureOptions local = options;
    local.tolerance = options.tolerance * (s.hi - s.lo) / total;
    // The density itself is smooth inside a segment; evaluate it at the
    // interior to avoid ambiguous endpoint values.
    const double mid = 0.5 * (s.lo + s.hi);
    const double rho_mid = measure.density(mid);
    const bool constant = !std::holds_alternative<Gaussian>(fam) &&
                          !(std::holds_alternative<Truncated>(fam) &&
                            !std::get<Truncated>(fam).restricted);
    const Integrand g = constant
                            ? Integrand([&f, rho_mid](double x) {
                                return f(x) * rho_mid;
                              })
                            : weighted;
    const auto part = integrate_lebesgue(g, s.lo, s.hi, breakpoints, local);
    result.value += part.value;
    result.residual += part.residual;
    result.evaluations += part.evaluations;
  }
  result.converged = result.residual <= options.tolerance;
  return result;
}

}  // namespace anderson
