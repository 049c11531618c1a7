#include "anderson/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace anderson {

namespace {

double ipow(double base, std::size_t n) {
  double out = 1.0;
  for (std::size_t k = 0; k < n; ++k) out *= base;
  return out;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double size_of(const Ensemble& e) { return static_cast<double>(e.size()); }

std::vector<double> to_values(const std::vector<std::int64_t>& xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

std::int64_t factorial(std::size_t n) {
  if (n > 20) throw std::overflow_error("factorial: n > 20");
  std::int64_t out = 1;
  for (std::size_t k = 2; k <= n; ++k) out *= static_cast<std::int64_t>(k);
  return out;
}

double hoeffding_radius(std::size_t n, double range, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in ]0, 1[");
  }
  if (!(range > 0.0)) throw std::invalid_argument("range must be > 0");
  if (n == 0) throw std::invalid_argument("need at least one sample");
  return range * std::sqrt(std::log(2.0 / (1.0 - confidence)) /
                           (2.0 * static_cast<double>(n)));
}

ConfidenceInterval hoeffding_ci(std::span<const double> samples, double range,
                                double confidence) {
  const double radius = hoeffding_radius(samples.size(), range, confidence);
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(samples.size());
  return {mean - radius, mean + radius};
}

BoundReport make_report(std::string experiment, std::size_t n,
                        std::span<const double> values, double range,
                        double bound, const MonteCarloConfig& mc) {
  const double radius = hoeffding_radius(values.size(), range, mc.confidence);
  double sum = 0.0;
  for (double x : values) sum += x;
  const double mean = sum / static_cast<double>(values.size());
  BoundReport r;
  r.experiment = std::move(experiment);
  r.n = n;
  r.samples = values.size();
  r.empirical = mean;
  r.ci_low = std::max(0.0, mean - radius);
  r.ci_high = std::min(range, mean + radius);
  r.bound = bound * mc.bound_scale;
  r.range_cap = range;
  if (r.bound > 0.0) {
    r.ratio = r.empirical / r.bound;
  } else {
    r.ratio = r.empirical > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  r.pass = r.ci_low <= r.bound;
  return r;
}

std::vector<std::size_t> sigma_omega(std::span<const std::size_t> counts) {
  std::vector<std::size_t> sigma(counts.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  std::stable_sort(sigma.begin(), sigma.end(),
                   [&](std::size_t x, std::size_t y) {
                     return counts[x] < counts[y];
                   });
  return sigma;
}

std::int64_t falling_product(std::span<const std::size_t> sorted_counts) {
  std::int64_t out = 1;
  for (std::size_t k = 0; k < sorted_counts.size(); ++k) {
    if (k > 0 && sorted_counts[k] < sorted_counts[k - 1]) {
      throw std::invalid_argument("falling_product: counts must be sorted");
    }
    out *= static_cast<std::int64_t>(sorted_counts[k]) -
           static_cast<std::int64_t>(k);
  }
  return out;
}

std::int64_t ordered_falling_product(std::span<const std::size_t> counts) {
  std::vector<std::size_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  return falling_product(sorted);
}

std::vector<std::vector<std::size_t>> sample_counts(
    const Ensemble& ensemble, std::span<const HalfOpenInterval> intervals,
    const MonteCarloConfig& mc) {
  return map_samples<std::vector<std::size_t>>(
      ensemble, mc, [&](const SymmetricBandMatrix& h, const PotentialConfig&) {
        return count_in_intervals(h, intervals);
      });
}

std::optional<std::vector<std::size_t>> chain_order(
    std::span<const HalfOpenInterval> intervals) {
  std::vector<std::size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return intervals[x].length() < intervals[y].length();
                   });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!intervals[order[k - 1]].subset_of(intervals[order[k]])) {
      return std::nullopt;
    }
  }
  return order;
}

BoundReport check_wegner(const Ensemble& ensemble,
                         const HalfOpenInterval& interval,
                         const MonteCarloConfig& mc) {
  const std::vector<HalfOpenInterval> family{interval};
  const auto counts = sample_counts(ensemble, family, mc);
  std::vector<double> values;
  values.reserve(counts.size());
  for (const auto& c : counts) values.push_back(static_cast<double>(c[0]));
  const double bound = ensemble.q_lambda(interval.length()) * size_of(ensemble);
  return make_report("wegner", 1, values, size_of(ensemble), bound, mc);
}

MinamiPairResult check_minami_pair(const Ensemble& ensemble,
                                   const HalfOpenInterval& first,
                                   const HalfOpenInterval& second,
                                   const MonteCarloConfig& mc) {
  const std::vector<HalfOpenInterval> family{first, second};
  const auto counts = sample_counts(ensemble, family, mc);
  const double vol = size_of(ensemble);
  const double q1 = ensemble.q_lambda(first.length());
  const double q2 = ensemble.q_lambda(second.length());

  std::vector<double> general;
  general.reserve(counts.size());
  for (const auto& c : counts) {
    const auto n1 = static_cast<double>(c[0]);
    const auto n2 = static_cast<double>(c[1]);
    general.push_back(n1 * n2 - std::min(n1, n2));
  }
  MinamiPairResult out{
      make_report("minami-general", 2, general, vol * vol,
                  2.0 * q1 * q2 * vol * vol, mc),
      std::nullopt};

  std::optional<std::pair<std::size_t, std::size_t>> nest;
  if (first.subset_of(second)) {
    nest = {0, 1};
  } else if (second.subset_of(first)) {
    nest = {1, 0};
  }
  if (nest) {
    std::vector<double> nested;
    nested.reserve(counts.size());
    for (const auto& c : counts) {
      const auto small = static_cast<double>(c[nest->first]);
      const auto large = static_cast<double>(c[nest->second]);
      nested.push_back(small * (large - 1.0));
    }
    out.nested = make_report("minami-nested", 2, nested, vol * vol,
                             q1 * q2 * vol * vol, mc);
  }
  return out;
}

GeneralizedResult check_generalized(
    const Ensemble& ensemble, std::span<const HalfOpenInterval> intervals,
    const MonteCarloConfig& mc, std::size_t interval_cap) {
  const std::size_t n = intervals.size();
  if (n == 0 || n > interval_cap) {
    throw std::invalid_argument("check_generalized: need 1 <= n <= " +
                                std::to_string(interval_cap) + " intervals");
  }
  const auto counts = sample_counts(ensemble, intervals, mc);
  const double vol = size_of(ensemble);

  GeneralizedResult out;
  std::vector<std::int64_t> products;
  products.reserve(counts.size());
  for (const auto& c : counts) {
    auto sigma = sigma_omega(c);
    std::vector<std::size_t> sorted;
    sorted.reserve(n);
    for (std::size_t k : sigma) sorted.push_back(c[k]);
    const std::int64_t p = falling_product(sorted);
    if (p < 0) throw std::logic_error("negative sigma-ordered product");
    products.push_back(p);
    out.observed_sigmas.insert(std::move(sigma));
  }
  double q_product = 1.0;
  for (const auto& iv : intervals) q_product *= ensemble.q_lambda(iv.length());
  const double base = q_product * ipow(vol, n);
  const auto values = to_values(products);
  const std::string id = "generalized-n" + std::to_string(n);
  out.factorial =
      make_report(id + "-factorial", n, values, ipow(vol, n),
                  static_cast<double>(factorial(n)) * base, mc);
  if (chain_order(intervals)) {
    out.nested = make_report(id + "-nested", n, values, ipow(vol, n), base, mc);
  }
  return out;
}

std::string to_string(ProbabilityMode mode) {
  switch (mode) {
    case ProbabilityMode::single_n:
      return "single-n";
    case ProbabilityMode::staircase:
      return "staircase";
    case ProbabilityMode::pair_distance:
      return "pair-distance";
  }
  return "?";
}

BoundReport check_probability(const Ensemble& ensemble,
                              std::span<const HalfOpenInterval> intervals,
                              ProbabilityMode mode, std::size_t n,
                              const MonteCarloConfig& mc) {
  const double vol = size_of(ensemble);
  switch (mode) {
    case ProbabilityMode::single_n: {
      if (intervals.size() != 1 || n == 0) {
        throw std::invalid_argument(
            "single-n mode needs exactly one interval and n >= 1");
      }
      const auto counts = sample_counts(ensemble, intervals, mc);
      std::vector<double> hits;
      hits.reserve(counts.size());
      for (const auto& c : counts) hits.push_back(c[0] >= n ? 1.0 : 0.0);
      const double bound =
          ipow(ensemble.q_lambda(intervals[0].length()) * vol, n) /
          static_cast<double>(factorial(n));
      return make_report("probability-single-n" + std::to_string(n), n, hits,
                         1.0, bound, mc);
    }
    case ProbabilityMode::staircase: {
      const std::size_t m = intervals.size();
      if (m == 0) throw std::invalid_argument("staircase mode needs intervals");
      const auto counts = sample_counts(ensemble, intervals, mc);
      std::vector<double> hits;
      hits.reserve(counts.size());
      for (const auto& c : counts) {
        std::vector<std::size_t> sorted(c.begin(), c.end());
        std::sort(sorted.begin(), sorted.end());
        bool event = true;
        for (std::size_t k = 0; k < m; ++k) event = event && sorted[k] >= k + 1;
        hits.push_back(event ? 1.0 : 0.0);
      }
      double q_product = 1.0;
      for (const auto& iv : intervals) {
        q_product *= ensemble.q_lambda(iv.length());
      }
      const double multiplicity =
          chain_order(intervals) ? 1.0 : static_cast<double>(factorial(m));
      return make_report("probability-staircase-n" + std::to_string(m), m,
                         hits, 1.0, multiplicity * q_product * ipow(vol, m),
                         mc);
    }
    case ProbabilityMode::pair_distance: {
      if (intervals.size() != 2) {
        throw std::invalid_argument("pair-distance mode needs two intervals");
      }
      const auto counts = sample_counts(ensemble, intervals, mc);
      std::vector<double> hits;
      hits.reserve(counts.size());
      for (const auto& c : counts) {
        hits.push_back(c[0] >= 1 && c[1] >= 1 ? 1.0 : 0.0);
      }
      const auto& i1 = intervals[0];
      const auto& i2 = intervals[1];
      const double bound =
          std::min(ensemble.q_lambda(i1.length()),
                   ensemble.q_lambda(i2.length())) *
          ensemble.q_lambda(distance(i1, i2) + i1.length() + i2.length()) *
          vol * vol;
      return make_report("probability-pair-distance", 2, hits, 1.0, bound, mc);
    }
  }
  throw std::logic_error("unknown probability mode");
}

namespace {

BoundReport statistic_report(const Ensemble& ensemble, StatisticKind kind,
                             std::span<const HalfOpenInterval> intervals,
                             const MonteCarloConfig& mc) {
  switch (kind) {
    case StatisticKind::wegner:
      if (intervals.size() != 1) {
        throw std::invalid_argument("wegner statistic needs one interval");
      }
      return check_wegner(ensemble, intervals[0], mc);
    case StatisticKind::minami:
      if (intervals.size() == 1) {
        return check_minami_pair(ensemble, intervals[0], intervals[0], mc)
            .general;
      }
      if (intervals.size() != 2) {
        throw std::invalid_argument("minami statistic needs one or two intervals");
      }
      return check_minami_pair(ensemble, intervals[0], intervals[1], mc).general;
    case StatisticKind::generalized:
      return check_generalized(ensemble, intervals, mc).factorial;
  }
  throw std::logic_error("unknown statistic");
}

}  // namespace

TruncationResult truncation_convergence(
    const Ensemble& ensemble, StatisticKind statistic,
    std::span<const HalfOpenInterval> intervals,
    std::span<const double> cutoffs, const MonteCarloConfig& mc) {
  TruncationResult out;
  out.baseline = statistic_report(ensemble, statistic, intervals, mc);
  out.baseline.experiment = "truncation-" + out.baseline.experiment + "-full";
  for (double cutoff : cutoffs) {
    std::vector<Measure> truncated;
    truncated.reserve(ensemble.measures.size());
    double normalizer = 1.0;
    for (const Measure& m : ensemble.measures) {
      truncated.push_back(truncate(m, cutoff));
      normalizer = std::max(normalizer, truncated.back().normalizer());
    }
    const Ensemble cut(ensemble.volume, ensemble.free, std::move(truncated));
    TruncationPoint point{cutoff, normalizer,
                          statistic_report(cut, statistic, intervals, mc), 0.0,
                          0.0};
    point.report.experiment = "truncation-" + point.report.experiment + "-M" +
                              short_number(cutoff);
    point.difference =
        std::abs(point.report.empirical - out.baseline.empirical);
    point.combined_radius =
        hoeffding_radius(point.report.samples, point.report.range_cap,
                         mc.confidence) +
        hoeffding_radius(out.baseline.samples, out.baseline.range_cap,
                         mc.confidence);
    out.points.push_back(std::move(point));
  }
  return out;
}

}  // namespace anderson
