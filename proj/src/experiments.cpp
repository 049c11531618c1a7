#include "anderson/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "anderson/eigencount.hpp"

namespace anderson {

std::vector<double> default_holder_scales() {
  std::vector<double> out;
  for (int j = 4; j <= 80; ++j) out.push_back(std::exp2(-j / 4.0));
  return out;
}

double MultiplicityPlan::cell(std::size_t scale) const {
  return std::pow(static_cast<double>(scale), -q);
}

double MultiplicityPlan::exponent(std::size_t count) const {
  const double nn = static_cast<double>(count == 0 ? n : count);
  return -(nn * fit.alpha - 1.0) * q + nn * static_cast<double>(d);
}

double MultiplicityPlan::bound(std::size_t scale, std::size_t count) const {
  if (count == 0) count = n;
  const double base =
      std::pow(std::exp2(fit.alpha) * fit.u, static_cast<double>(count)) /
      static_cast<double>(factorial(count));
  return (window.length() + 1.0) * base *
         std::pow(static_cast<double>(scale), exponent(count));
}

MultiplicityPlan plan_multiplicity(const Measure& measure, std::size_t d,
                                   const HalfOpenInterval& window,
                                   std::size_t k_min, std::size_t k_max,
                                   double margin, FreeOperator free) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (k_min > k_max || k_max > 20) {
    throw std::invalid_argument("scale exponents must satisfy k_min <= k_max <= 20");
  }
  if (!(margin > 0.0)) throw std::invalid_argument("q margin must be positive");
  const auto scales = default_holder_scales();
  HolderFit fit = holder_fit(measure, scales);
  if (fit.alpha > 1.0 + 1e-6) {
    throw std::invalid_argument("fitted Hoelder exponent exceeds 1");
  }
  if (fit.alpha > 1.0) {
    fit.alpha = 1.0;
    fit.u = 0.0;
    for (double s : scales) fit.u = std::max(fit.u, measure.q(s) / s);
  }
  const auto n = static_cast<std::size_t>(std::floor(1.0 / fit.alpha)) + 1;
  const double na = static_cast<double>(n) * fit.alpha;
  if (!(na > 1.0)) throw std::logic_error("N alpha <= 1");
  const double q = static_cast<double>(n * d) / (na - 1.0) * (1.0 + margin);

  MultiplicityPlan plan{measure, fit, d, std::move(free), window, n, q, margin, {}};
  for (std::size_t k = k_min; k <= k_max; ++k) {
    plan.scales.push_back(std::size_t{1} << k);
  }
  if (!(plan.exponent() < 0.0)) throw std::logic_error("bound exponent not negative");
  return plan;
}

std::int64_t covering_count(const HalfOpenInterval& window, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("covering cell must be positive");
  const double half = std::floor(window.length() / (2.0 * h));
  if (!(half < 0x1p61)) {
    throw std::overflow_error("covering count overflows");
  }
  return 2 * (static_cast<std::int64_t>(half) + 1);
}

std::vector<HalfOpenInterval> covering(const HalfOpenInterval& window,
                                       double h) {
  const std::int64_t count = covering_count(window, h);
  if (count > kCoveringCap) {
    throw std::length_error("covering has " + std::to_string(count) +
                            " intervals (cap 1e7); use a smaller q or L");
  }
  std::vector<HalfOpenInterval> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const double lo = window.a() + static_cast<double>(k) * h;
    out.emplace_back(lo, window.a() + static_cast<double>(k + 2) * h);
  }
  return out;
}

bool covering_event(std::span<const double> sorted_spectrum,
                    const HalfOpenInterval& window, double h, std::size_t n) {
  if (n == 0) return true;
  const std::int64_t count = covering_count(window, h);
  const double a = window.a();
  // For n consecutive eigenvalues lo <= ... <= hi, the best candidate is the
  // last interval starting below lo. The cells overhang the window on the
  // right, so levels just above b still count.
  for (std::size_t i = 0; i + n <= sorted_spectrum.size(); ++i) {
    const double lo = sorted_spectrum[i];
    const double hi = sorted_spectrum[i + n - 1];
    if (lo <= a) continue;
    auto k = static_cast<std::int64_t>(std::ceil((lo - a) / h)) - 1;
    // Guard against rounding in the division.
    while (k > 0 && !(a + static_cast<double>(k) * h < lo)) --k;
    while (a + static_cast<double>(k + 1) * h < lo) ++k;
    k = std::min(k, count - 1);
    if (hi <= a + static_cast<double>(k + 2) * h) return true;
  }
  return false;
}

BoundReport event_b_probability(const MultiplicityPlan& plan, std::size_t scale,
                                const MonteCarloConfig& mc,
                                std::size_t n_override) {
  if (std::find(plan.scales.begin(), plan.scales.end(), scale) ==
      plan.scales.end()) {
    throw std::invalid_argument("scale " + std::to_string(scale) +
                                " is not in the plan");
  }
  const std::size_t n = n_override == 0 ? plan.n : n_override;
  const double h = plan.cell(scale);
  const Ensemble ensemble(FiniteVolume(std::vector<std::size_t>(plan.d, scale)),
                          plan.free, plan.measure);
  const auto hits = map_samples<double>(
      ensemble, mc, [&](const SymmetricBandMatrix& m, const PotentialConfig&) {
        const auto spectrum = full_spectrum(m);
        return covering_event(spectrum, plan.window, h, n) ? 1.0 : 0.0;
      });
  return make_report("multiplicity-L" + std::to_string(scale), n, hits, 1.0,
                     plan.bound(scale, n), mc);
}

double min_cluster_gap(std::span<const double> sorted_spectrum, std::size_t m) {
  if (m < 2) throw std::invalid_argument("cluster size must be at least 2");
  if (sorted_spectrum.size() < m) {
    throw std::invalid_argument("spectrum shorter than cluster size");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + m <= sorted_spectrum.size(); ++i) {
    best = std::min(best, sorted_spectrum[i + m - 1] - sorted_spectrum[i]);
  }
  return best;
}

namespace {

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_exponential(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("KS test needs data");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = x[i] <= 0.0 ? 0.0 : -std::expm1(-x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f,
                  f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_tail((root + 0.12 + 0.11 / root) * d)};
}

SpacingResult spacing_statistics(const Ensemble& ensemble,
                                 const HalfOpenInterval& window,
                                 const MonteCarloConfig& mc) {
  const auto levels = map_samples<std::vector<double>>(
      ensemble, mc, [&](const SymmetricBandMatrix& m, const PotentialConfig&) {
        std::vector<double> inside;
        for (double e : full_spectrum(m)) {
          if (window.contains(e)) inside.push_back(e);
        }
        return inside;
      });
  std::vector<double> pooled;
  for (const auto& v : levels) pooled.insert(pooled.end(), v.begin(), v.end());
  std::sort(pooled.begin(), pooled.end());
  const double per_sample = 1.0 / static_cast<double>(levels.size());

  SpacingResult out{};
  out.eigenvalues = pooled.size();
  for (const auto& v : levels) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      const auto below = [&](double e) {
        return static_cast<double>(
            std::upper_bound(pooled.begin(), pooled.end(), e) - pooled.begin());
      };
      out.spacings.push_back((below(v[i]) - below(v[i - 1])) * per_sample);
    }
  }
  if (out.spacings.size() < kMinSpacings) {
    throw std::runtime_error("spacing statistics need at least 1000 spacings, got " +
                             std::to_string(out.spacings.size()));
  }
  const double mean =
      std::accumulate(out.spacings.begin(), out.spacings.end(), 0.0) /
      static_cast<double>(out.spacings.size());
  if (mean > 0.0) {
    for (double& s : out.spacings) s /= mean;
  }
  const auto ks = ks_exponential(out.spacings);
  out.ks_distance = ks.distance;
  out.p_value = ks.p_value;
  return out;
}

}  // namespace anderson
