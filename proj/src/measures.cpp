#include "anderson/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace anderson {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

PiecewiseConstant make_pwc(std::vector<double> breaks,
                           std::vector<double> heights) {
  if (breaks.size() < 2 || heights.size() + 1 != breaks.size()) {
    throw std::invalid_argument(
        "pwc: need m+1 breakpoints for m heights (m >= 1)");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < heights.size(); ++k) {
    if (!(breaks[k] < breaks[k + 1])) {
      throw std::invalid_argument("pwc: breakpoints must increase strictly");
    }
    if (!(heights[k] >= 0.0) || !std::isfinite(heights[k])) {
      throw std::invalid_argument("pwc: heights must be finite and >= 0");
    }
    total += heights[k] * (breaks[k + 1] - breaks[k]);
  }
  if (!(total > 0.0)) throw std::invalid_argument("pwc: zero total mass");
  for (double& h : heights) h /= total;
  return {std::move(breaks), std::move(heights)};
}

double pwc_cdf(const PiecewiseConstant& p, double x) {
  if (x <= p.breaks.front()) return 0.0;
  if (x >= p.breaks.back()) return 1.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < p.heights.size(); ++k) {
    const double lo = p.breaks[k];
    const double hi = p.breaks[k + 1];
    if (x <= hi) return acc + p.heights[k] * (x - lo);
    acc += p.heights[k] * (hi - lo);
  }
  return 1.0;
}

double pwc_density(const PiecewiseConstant& p, double x) {
  for (std::size_t k = 0; k < p.heights.size(); ++k) {
    if (p.breaks[k] < x && x <= p.breaks[k + 1]) return p.heights[k];
  }
  return 0.0;
}

// g(a) = F(a + s) - F(a) is piecewise linear in a with kinks where a or
// a + s crosses a breakpoint, so its maximum sits at one of those kinks.
double pwc_concentration(const PiecewiseConstant& p, double s) {
  double best = 0.0;
  for (double x : p.breaks) {
    for (double a : {x, x - s}) {
      best = std::max(best, pwc_cdf(p, a + s) - pwc_cdf(p, a));
    }
  }
  return std::min(best, 1.0);
}

double pwc_sample(const PiecewiseConstant& p, RandomStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < p.heights.size(); ++k) {
    const double w = p.breaks[k + 1] - p.breaks[k];
    const double m = p.heights[k] * w;
    if (u < acc + m && m > 0.0) {
      return std::min(p.breaks[k] + (u - acc) / p.heights[k],
                      p.breaks[k + 1]);
    }
    acc += m;
  }
  // Rounding left u above the accumulated mass; return the last charged
  // point.
  for (std::size_t k = p.heights.size(); k-- > 0;) {
    if (p.heights[k] > 0.0) return p.breaks[k + 1];
  }
  return p.breaks.back();
}

PiecewiseConstant pwc_of_uniform(const Uniform& u) {
  return {{u.lo, u.hi}, {1.0 / (u.hi - u.lo)}};
}

std::optional<PiecewiseConstant> restrict_pwc(const PiecewiseConstant& p,
                                              double cutoff) {
  std::vector<double> breaks;
  std::vector<double> heights;
  for (std::size_t k = 0; k < p.heights.size(); ++k) {
    const double lo = std::max(p.breaks[k], -cutoff);
    const double hi = std::min(p.breaks[k + 1], cutoff);
    if (!(lo < hi)) continue;
    if (breaks.empty()) {
      breaks.push_back(lo);
    } else if (breaks.back() != lo) {
      // Pieces are contiguous, so this only happens for a zero-mass gap.
      heights.push_back(0.0);
      breaks.push_back(lo);
    }
    heights.push_back(p.heights[k]);
    breaks.push_back(hi);
  }
  if (heights.empty()) return std::nullopt;
  double total = 0.0;
  for (std::size_t k = 0; k < heights.size(); ++k) {
    total += heights[k] * (breaks[k + 1] - breaks[k]);
  }
  if (!(total > 0.0)) return std::nullopt;
  return make_pwc(std::move(breaks), std::move(heights));
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Snap tolerance for the Cantor recursion; the map s -> 3s amplifies
// rounding, and the Cantor function is only Hoelder-continuous, so lattice
// points must be recognised exactly.
constexpr double kTriadicSnap = 64.0 * std::numeric_limits<double>::epsilon();

bool near(double x, double y) { return std::abs(x - y) <= kTriadicSnap; }

// S(s) for the ideal middle-thirds measure. S coincides with the Cantor
// function: S(s) = S(3s)/2 on [0, 1/3], 1/2 on [1/3, 2/3] and
// 1/2 + S(3s - 2)/2 on [2/3, 1].
double cantor_concentration(double s) {
  double acc = 0.0;
  double weight = 1.0;
  for (int level = 0; level < 80; ++level) {
    if (s >= 1.0 || near(s, 1.0)) return acc + weight;
    if (s <= 0.0) return acc;
    if (near(s, 1.0 / 3.0) || near(s, 2.0 / 3.0) ||
        (s > 1.0 / 3.0 && s < 2.0 / 3.0)) {
      return acc + 0.5 * weight;
    }
    weight *= 0.5;
    if (s < 1.0 / 3.0) {
      s *= 3.0;
    } else {
      acc += weight;
      s = 3.0 * s - 2.0;
    }
  }
  return acc;
}

double cantor_sample(const Cantor& c, RandomStream& rng) {
  double v = 0.0;
  std::uint64_t bits = 0;
  int left = 0;
  // Horner from the deepest digit: v = sum_k 2 d_k 3^-k.
  for (int k = c.depth; k >= 1; --k) {
    if (left == 0) {
      bits = rng.next_u64();
      left = 64;
    }
    const double digit = (bits & 1u) ? 2.0 : 0.0;
    bits >>= 1;
    --left;
    v = (v + digit) / 3.0;
  }
  return v;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double cantor_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double acc = 0.0;
  double weight = 0.5;
  for (int level = 0; level < 64; ++level) {
    x *= 3.0;
    const double digit = std::floor(x);
    x -= digit;
    if (digit >= 2.0) {
      acc += weight;
    } else if (digit >= 1.0) {
      return acc + weight;
    }
    weight *= 0.5;
  }
  return acc;
}

Measure Measure::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("uniform(a,b) requires finite a < b");
  }
  return Measure(Uniform{lo, hi});
}

Measure Measure::piecewise_constant(std::vector<double> breaks,
                                    std::vector<double> heights) {
  return Measure(make_pwc(std::move(breaks), std::move(heights)));
}

Measure Measure::cantor(int depth) {
  if (depth < 1 || depth > 64) {
    throw std::invalid_argument("cantor(K) requires 1 <= K <= 64");
  }
  return Measure(Cantor{depth});
}

Measure Measure::gaussian(double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean) || !std::isfinite(stddev)) {
    throw std::invalid_argument("gauss(m,s) requires finite m and s > 0");
  }
  return Measure(Gaussian{mean, stddev});
}

std::optional<double> Measure::density_sup() const {
  return std::visit(
      Overloaded{
          [](const Uniform& u) -> std::optional<double> {
            return 1.0 / (u.hi - u.lo);
          },
          [](const PiecewiseConstant& p) -> std::optional<double> {
            return *std::max_element(p.heights.begin(), p.heights.end());
          },
          [](const Cantor&) -> std::optional<double> { return std::nullopt; },
          [](const Gaussian& g) -> std::optional<double> {
            return normal_pdf(0.0) / g.stddev;
          },
          [](const Truncated& t) -> std::optional<double> {
            if (t.restricted) {
              return *std::max_element(t.restricted->heights.begin(),
                                       t.restricted->heights.end());
            }
            if (const auto* g = std::get_if<Gaussian>(&t.inner->family())) {
              const double nearest =
                  std::clamp(g->mean, -t.cutoff, t.cutoff);
              return t.normalizer *
                     normal_pdf((nearest - g->mean) / g->stddev) / g->stddev;
            }
            return std::nullopt;
          },
      },
      family_);
}

double Measure::density(double x) const {
  return std::visit(
      Overloaded{
          [x](const Uniform& u) {
            return (u.lo <= x && x <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0;
          },
          [x](const PiecewiseConstant& p) { return pwc_density(p, x); },
          [](const Cantor&) -> double {
            throw std::domain_error("cantor measure has no density");
          },
          [x](const Gaussian& g) {
            return normal_pdf((x - g.mean) / g.stddev) / g.stddev;
          },
          [x](const Truncated& t) -> double {
            if (t.restricted) return pwc_density(*t.restricted, x);
            if (std::abs(x) > t.cutoff) return 0.0;
            return t.normalizer * t.inner->density(x);
          },
      },
      family_);
}

double Measure::cdf(double x) const {
  return std::visit(
      Overloaded{
          [x](const Uniform& u) {
            return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0);
          },
          [x](const PiecewiseConstant& p) { return pwc_cdf(p, x); },
          [x](const Cantor&) { return cantor_cdf(x); },
          [x](const Gaussian& g) { return normal_cdf((x - g.mean) / g.stddev); },
          [x](const Truncated& t) {
            if (t.restricted) return pwc_cdf(*t.restricted, x);
            const double lo = t.inner->cdf(-t.cutoff);
            const double hi = t.inner->cdf(std::clamp(x, -t.cutoff, t.cutoff));
            return std::clamp(t.normalizer * (hi - lo), 0.0, 1.0);
          },
      },
      family_);
}

double Measure::mass(double lo, double hi) const {
  if (!(lo < hi)) return 0.0;
  if (const auto* g = std::get_if<Gaussian>(&family_)) {
    // Difference of upper tails keeps precision far from the mean.
    const double zl = (lo - g->mean) / g->stddev;
    const double zh = (hi - g->mean) / g->stddev;
    if (zl > 0.0) {
      return 0.5 * (std::erfc(zl / std::sqrt(2.0)) -
                    std::erfc(zh / std::sqrt(2.0)));
    }
    if (zh < 0.0) {
      return 0.5 * (std::erfc(-zh / std::sqrt(2.0)) -
                    std::erfc(-zl / std::sqrt(2.0)));
    }
    return 1.0 - 0.5 * std::erfc(-zl / std::sqrt(2.0)) -
           0.5 * std::erfc(zh / std::sqrt(2.0));
  }
  return std::max(0.0, cdf(hi) - cdf(lo));
}

std::pair<double, double> Measure::support() const {
  return std::visit(
      Overloaded{
          [](const Uniform& u) { return std::pair{u.lo, u.hi}; },
          [](const PiecewiseConstant& p) {
            return std::pair{p.breaks.front(), p.breaks.back()};
          },
          [](const Cantor&) { return std::pair{0.0, 1.0}; },
          [](const Gaussian&) { return std::pair{-kInf, kInf}; },
          [](const Truncated& t) {
            if (t.restricted) {
              return std::pair{t.restricted->breaks.front(),
                               t.restricted->breaks.back()};
            }
            const auto [lo, hi] = t.inner->support();
            return std::pair{std::max(lo, -t.cutoff), std::min(hi, t.cutoff)};
          },
      },
      family_);
}

double Measure::normalizer() const {
  if (const auto* t = std::get_if<Truncated>(&family_)) return t->normalizer;
  return 1.0;
}

double Measure::sample(RandomStream& rng) const {
  return std::visit(
      Overloaded{
          [&rng](const Uniform& u) {
            return u.lo + (u.hi - u.lo) * rng.uniform();
          },
          [&rng](const PiecewiseConstant& p) { return pwc_sample(p, rng); },
          [&rng](const Cantor& c) { return cantor_sample(c, rng); },
          [&rng](const Gaussian& g) { return g.mean + g.stddev * rng.normal(); },
          [&rng](const Truncated& t) {
            // Expected number of rounds is the normalizer.
            for (long round = 0; round < 100'000'000L; ++round) {
              const double x = t.inner->sample(rng);
              if (-t.cutoff <= x && x <= t.cutoff) return x;
            }
            throw std::runtime_error("truncated sampling: rejection stalled");
          },
      },
      family_);
}

double Measure::concentration(double s) const {
  if (!(s >= 0.0)) {
    throw std::invalid_argument("concentration requires s >= 0");
  }
  if (s == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [s](const Uniform& u) { return std::min(1.0, s / (u.hi - u.lo)); },
          [s](const PiecewiseConstant& p) { return pwc_concentration(p, s); },
          [s](const Cantor&) { return cantor_concentration(s); },
          [s](const Gaussian& g) {
            // Symmetric window at the mode is optimal for a unimodal law.
            return std::erf(s / (2.0 * std::sqrt(2.0) * g.stddev));
          },
          [s](const Truncated& t) -> double {
            if (t.restricted) return pwc_concentration(*t.restricted, s);
            if (const auto* g = std::get_if<Gaussian>(&t.inner->family())) {
              if (s >= 2.0 * t.cutoff) return 1.0;
              const double a =
                  std::clamp(g->mean - 0.5 * s, -t.cutoff, t.cutoff - s);
              return std::min(1.0, t.normalizer * t.inner->mass(a, a + s));
            }
            if (std::holds_alternative<Cantor>(t.inner->family())) {
              // The optimal window [0, s] of the full measure lies inside
              // [0, M] whenever s < M.
              if (s >= std::min(t.cutoff, 1.0)) return 1.0;
              return std::min(1.0, t.normalizer * cantor_concentration(s));
            }
            throw std::logic_error("unreachable truncation family");
          },
      },
      family_);
}

double Measure::q(double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("q requires s >= 0");
  if (const auto rho = density_sup()) return *rho * s;
  return 8.0 * concentration(s);
}

std::string Measure::describe() const {
  return std::visit(
      Overloaded{
          [](const Uniform& u) {
            return "uniform(" + fmt_double(u.lo) + "," + fmt_double(u.hi) +
                   ")";
          },
          [](const PiecewiseConstant& p) {
            std::string out = "pwc([";
            for (std::size_t k = 0; k < p.breaks.size(); ++k) {
              if (k) out += ",";
              out += fmt_double(p.breaks[k]);
            }
            out += "],[";
            for (std::size_t k = 0; k < p.heights.size(); ++k) {
              if (k) out += ",";
              out += fmt_double(p.heights[k]);
            }
            return out + "])";
          },
          [](const Cantor& c) {
            return "cantor(" + std::to_string(c.depth) + ")";
          },
          [](const Gaussian& g) {
            return "gauss(" + fmt_double(g.mean) + "," + fmt_double(g.stddev) +
                   ")";
          },
          [](const Truncated& t) {
            return "trunc(" + t.inner->describe() + "," +
                   fmt_double(t.cutoff) + ")";
          },
      },
      family_);
}

double q_lambda(std::span<const Measure> measures, double s) {
  if (measures.empty()) {
    throw std::invalid_argument("q_lambda needs at least one measure");
  }
  double best = 0.0;
  for (const Measure& m : measures) best = std::max(best, m.q(s));
  return best;
}

Measure truncate(const Measure& measure, double cutoff) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw std::invalid_argument("truncate requires a finite cutoff M > 0");
  }
  // trunc(trunc(mu, M1), M2) = trunc(mu, min(M1, M2)).
  if (const auto* t = std::get_if<Truncated>(&measure.family())) {
    return truncate(*t->inner, std::min(cutoff, t->cutoff));
  }
  const double inside = measure.mass(-cutoff, cutoff);
  if (!(inside > 0.0)) {
    throw std::invalid_argument("truncate: mu([-M, M]) = 0 for M = " +
                                fmt_double(cutoff));
  }
  Truncated t{std::make_shared<const Measure>(measure), cutoff, 1.0 / inside,
              std::nullopt};
  if (const auto* u = std::get_if<Uniform>(&measure.family())) {
    t.restricted = restrict_pwc(pwc_of_uniform(*u), cutoff);
  } else if (const auto* p = std::get_if<PiecewiseConstant>(&measure.family())) {
    t.restricted = restrict_pwc(*p, cutoff);
  }
  return Measure(std::move(t));
}

HolderFit holder_fit(const Measure& measure, std::span<const double> scales) {
  if (scales.size() < 3) {
    throw std::invalid_argument("holder_fit needs at least 3 scales");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> kept;
  for (double s : scales) {
    if (!(s > 0.0)) throw std::invalid_argument("holder_fit scales must be > 0");
    const double q = measure.q(s);
    if (q <= 0.0) continue;
    xs.push_back(std::log(s));
    ys.push_back(std::log(q));
    kept.push_back(s);
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("holder_fit: fewer than 2 scales with Q > 0");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) {
    throw std::invalid_argument("holder_fit: scales must not all coincide");
  }
  const double alpha = sxy / sxx;
  if (!(alpha > 1e-12)) {
    throw std::invalid_argument(
        "holder_fit: Q is flat over the given scales, no Hoelder exponent");
  }
  HolderFit fit{alpha, std::exp(my - alpha * mx), 0.0,
                *std::max_element(kept.begin(), kept.end())};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.u = std::max(fit.u, std::exp(ys[i] - alpha * xs[i]));
  }
  return fit;
}

}  // namespace anderson
