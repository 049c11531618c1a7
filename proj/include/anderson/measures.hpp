#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anderson/rng.hpp"

namespace anderson {

class Measure;

struct Uniform {
  double lo;
  double hi;
};

/// Density h_k on ]x_{k-1}, x_k]. Heights are normalized to unit mass on
/// construction.
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> heights;
};

/// Middle-thirds Cantor measure on [0, 1]. Samples carry `depth` ternary
/// digits, so the sampled law has atoms of mass 2^-depth.
struct Cantor {
  int depth = 40;
};

struct Gaussian {
  double mean;
  double stddev;
};

/// c * chi_[-M, M] * inner with c = inner([-M, M])^-1.
struct Truncated {
  std::shared_ptr<const Measure> inner;
  double cutoff;
  double normalizer;
  // Set when the inner measure is piecewise constant (uniform included).
  std::optional<PiecewiseConstant> restricted;
};

/// Single-site probability law: sampling, distribution function,
/// concentration function S(s) = sup_a mu([a, a + s]) and the bound function
/// Q(s) used by every counting estimate.
class Measure {
 public:
  using Family = std::variant<Uniform, PiecewiseConstant, Cantor, Gaussian,
                              Truncated>;

  static Measure uniform(double lo, double hi);
  static Measure piecewise_constant(std::vector<double> breaks,
                                    std::vector<double> heights);
  static Measure cantor(int depth = 40);
  static Measure gaussian(double mean, double stddev);

  const Family& family() const { return family_; }

  /// Supremum of the density, absent for measures without a bounded density.
  std::optional<double> density_sup() const;

  /// Density at x; only meaningful when density_sup() is present.
  double density(double x) const;

  /// mu(]-inf, x]).
  double cdf(double x) const;

  /// mu([lo, hi]) (no atoms, so open/closed does not matter).
  double mass(double lo, double hi) const;

  /// Smallest closed interval carrying all the mass; infinite ends for the
  /// Gaussian.
  std::pair<double, double> support() const;

  /// c_{mu^(M)} for truncations, 1 otherwise.
  double normalizer() const;

  double sample(RandomStream& rng) const;
  double concentration(double s) const;
  double q(double s) const;

  /// Round-trips through parse_measure.
  std::string describe() const;

 private:
  explicit Measure(Family f) : family_(std::move(f)) {}
  friend Measure truncate(const Measure& measure, double cutoff);

  Family family_;
};

inline double sample(const Measure& m, RandomStream& rng) {
  return m.sample(rng);
}
inline double concentration(const Measure& m, double s) {
  return m.concentration(s);
}
inline double q_of(const Measure& m, double s) { return m.q(s); }

/// max_j Q_j(s) over a per-site sequence.
double q_lambda(std::span<const Measure> measures, double s);

/// mu^(M): the restriction of `measure` to [-M, M], renormalized.
Measure truncate(const Measure& measure, double cutoff);

struct HolderFit {
  double alpha;
  /// exp(intercept) of the least-squares line through (log s, log Q).
  double u_least_squares;
  /// Smallest U with Q(s) <= U s^alpha at every fitted scale.
  double u;
  /// Largest fitted scale.
  double s0;
};

/// Least-squares fit of log Q(s) against log s. Scales where Q vanishes are
/// dropped.
HolderFit holder_fit(const Measure& measure, std::span<const double> scales);

/// Parses `uniform(a,b)`, `cantor(K)`, `pwc([x0,...],[h1,...])`,
/// `gauss(m,s)` and `trunc(<measure>,M)`.
Measure parse_measure(std::string_view text);

/// Cantor distribution function, evaluated by ternary digit expansion.
double cantor_cdf(double x);

double normal_cdf(double x);

}  // namespace anderson
