#include "doctest.h"

#include <cmath>

#include "anderson/estimators.hpp"

using namespace anderson;

namespace {

// Zero hopping: the eigenvalues are the potential values themselves.
Ensemble decoupled(std::size_t sites, const Measure& m) {
  return Ensemble(FiniteVolume({sites}),
                  FreeOperator::custom(SymmetricBandMatrix(sites, 0)), m);
}

Ensemble chain(std::size_t sites, const Measure& m) {
  return Ensemble(FiniteVolume({sites}),
                  FreeOperator(FreeKind::adjacency, Boundary::simple), m);
}

MonteCarloConfig mc(std::size_t samples, std::uint64_t seed,
                    std::size_t workers = 1) {
  MonteCarloConfig c;
  c.samples = samples;
  c.seed = seed;
  c.workers = workers;
  return c;
}

bool covers(const BoundReport& r, double exact) {
  return r.ci_low <= exact && exact <= r.ci_high;
}

}  // namespace

TEST_CASE("sigma ordering is stable and 0-based") {
  const std::vector<std::size_t> a{3, 1, 2};
  CHECK(sigma_omega(a) == std::vector<std::size_t>{1, 2, 0});
  const std::vector<std::size_t> b{2, 2, 5};
  CHECK(sigma_omega(b) == std::vector<std::size_t>{0, 1, 2});
  const std::vector<std::size_t> c{4, 0, 4, 0};
  CHECK(sigma_omega(c) == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("falling products") {
  const std::vector<std::size_t> s1{1, 2, 3};
  CHECK(falling_product(s1) == 1);
  const std::vector<std::size_t> s2{2, 2, 5};
  CHECK(falling_product(s2) == 2 * 1 * 3);
  const std::vector<std::size_t> s3{1, 1};
  CHECK(falling_product(s3) == 0);
  const std::vector<std::size_t> s4{0, 7};
  CHECK(falling_product(s4) == 0);
  const std::vector<std::size_t> bad{3, 1};
  CHECK_THROWS_AS(falling_product(bad), std::invalid_argument);
  const std::vector<std::size_t> raw{3, 1, 2};
  CHECK(ordered_falling_product(raw) == 1);
  // Brute force: never negative for sorted input.
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = x; y < 5; ++y)
      for (std::size_t z = y; z < 5; ++z) {
        const std::vector<std::size_t> s{x, y, z};
        const std::int64_t expected = static_cast<std::int64_t>(x) *
                                      (static_cast<std::int64_t>(y) - 1) *
                                      (static_cast<std::int64_t>(z) - 2);
        REQUIRE(falling_product(s) == expected);
        REQUIRE(falling_product(s) >= 0);
      }
}

TEST_CASE("factorial") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(5) == 120);
  CHECK(factorial(20) == 2432902008176640000LL);
  CHECK_THROWS_AS(factorial(21), std::overflow_error);
}

TEST_CASE("Hoeffding radius") {
  CHECK(hoeffding_radius(5000, 1.0, 0.99) ==
        doctest::Approx(std::sqrt(std::log(200.0) / 10000.0)).epsilon(1e-12));
  CHECK(hoeffding_radius(5000, 1.0, 0.99) == doctest::Approx(0.0230).epsilon(1e-3));
  CHECK(hoeffding_radius(5000, 3.0, 0.99) ==
        doctest::Approx(3.0 * hoeffding_radius(5000, 1.0, 0.99)));
  CHECK_THROWS_AS(hoeffding_radius(0, 1.0, 0.99), std::invalid_argument);
  CHECK_THROWS_AS(hoeffding_radius(10, 1.0, 1.0), std::invalid_argument);
  const std::vector<double> xs{0, 1, 0, 1};
  const auto ci = hoeffding_ci(xs, 1.0, 0.99);
  CHECK(ci.low == doctest::Approx(0.5 - hoeffding_radius(4, 1.0, 0.99)));
}

TEST_CASE("report pass rule and bound scale") {
  std::vector<double> v(100, 0.5);
  auto c = mc(100, 0);
  auto r = make_report("x", 1, v, 1.0, 0.4, c);
  CHECK(r.empirical == 0.5);
  CHECK(r.ci_low == doctest::Approx(0.5 - hoeffding_radius(100, 1.0, 0.99)));
  CHECK(r.ratio == doctest::Approx(1.25));
  CHECK(r.pass);  // ci_low is below 0.4 at 100 samples
  c.bound_scale = 0.0;
  r = make_report("x", 1, v, 1.0, 0.4, c);
  CHECK(r.bound == 0.0);
  CHECK_FALSE(r.pass);
  std::vector<double> w(100000, 0.5);
  r = make_report("x", 1, w, 1.0, 0.1, mc(100000, 0));
  CHECK_FALSE(r.pass);
}

TEST_CASE("scalar Wegner saturation") {
  const auto e = decoupled(1, Measure::uniform(0, 1));
  const auto r = check_wegner(e, {0.0, 0.2}, mc(20000, 1));
  CHECK(r.bound == doctest::Approx(0.2));
  CHECK(covers(r, 0.2));
  CHECK(r.pass);
}

TEST_CASE("Wegner mean matches the exact decoupled expectation") {
  const auto m = Measure::gaussian(0, 1);
  const auto e = decoupled(6, m);
  const HalfOpenInterval iv(-0.3, 0.1);
  const auto r = check_wegner(e, iv, mc(20000, 2));
  CHECK(covers(r, 6.0 * m.mass(-0.3, 0.1)));
  CHECK(r.bound == doctest::Approx(6.0 * m.q(0.4)));
  CHECK(r.pass);
}

TEST_CASE("Minami statistics on decoupled sites") {
  // Binomial(3, p): E[N1 N2 - min] with N1 = N2 is E[N(N-1)] = 6 p^2.
  const auto m = Measure::uniform(0, 1);
  const auto e = decoupled(3, m);
  const HalfOpenInterval iv(0.1, 0.4);
  const auto r = check_minami_pair(e, iv, iv, mc(20000, 3));
  CHECK(covers(r.general, 6.0 * 0.09));
  REQUIRE(r.nested);
  CHECK(covers(*r.nested, 6.0 * 0.09));
  CHECK(r.general.bound == doctest::Approx(2.0 * 0.3 * 0.3 * 9.0));
  CHECK(r.nested->bound == doctest::Approx(0.3 * 0.3 * 9.0));

  const HalfOpenInterval a(0.0, 0.2), b(0.5, 0.9);
  const auto d = check_minami_pair(e, a, b, mc(2000, 3));
  CHECK_FALSE(d.nested);
  CHECK(d.general.pass);
  CHECK(d.general.experiment == "minami-general");
}

TEST_CASE("generalized estimator with n = 1 equals Wegner") {
  const auto e = chain(10, Measure::uniform(-1, 1));
  const std::vector<HalfOpenInterval> one{{-0.5, 0.25}};
  const auto g = check_generalized(e, one, mc(3000, 4));
  const auto w = check_wegner(e, one[0], mc(3000, 4));
  CHECK(g.factorial.empirical == w.empirical);
  CHECK(g.factorial.bound == w.bound);
  REQUIRE(g.nested);
  CHECK(g.observed_sigmas.size() == 1);
  CHECK(g.factorial.experiment == "generalized-n1-factorial");
}

TEST_CASE("generalized estimator on nested and disjoint families") {
  const auto e = chain(8, Measure::uniform(-1, 1));
  const std::vector<HalfOpenInterval> nested{{-0.1, 0.1}, {-0.4, 0.4}, {-1, 1}};
  const auto g = check_generalized(e, nested, mc(2000, 5));
  REQUIRE(g.nested);
  CHECK(g.factorial.bound == doctest::Approx(6.0 * g.nested->bound));
  CHECK(g.factorial.pass);
  CHECK(g.nested->pass);
  for (const auto& s : g.observed_sigmas) {
    // Counts of nested intervals are ordered by inclusion up to ties.
    CHECK(s.size() == 3);
  }

  const std::vector<HalfOpenInterval> disjoint{{-1, -0.5}, {0, 0.3}};
  const auto h = check_generalized(e, disjoint, mc(2000, 5));
  CHECK_FALSE(h.nested);
  CHECK(h.factorial.pass);
  CHECK(h.observed_sigmas.size() >= 2);

  const std::vector<HalfOpenInterval> many(6, HalfOpenInterval(0, 1));
  CHECK_THROWS_AS(check_generalized(e, many, mc(10, 5)), std::invalid_argument);
}

TEST_CASE("chain detection") {
  const std::vector<HalfOpenInterval> nested{{0, 3}, {1, 2}, {0, 2}};
  const auto order = chain_order(nested);
  REQUIRE(order);
  CHECK(*order == std::vector<std::size_t>{1, 2, 0});
  const std::vector<HalfOpenInterval> crossing{{0, 2}, {1, 3}};
  CHECK_FALSE(chain_order(crossing));
}

TEST_CASE("probability modes on decoupled sites") {
  const auto m = Measure::uniform(0, 1);
  const auto e = decoupled(4, m);
  const std::vector<HalfOpenInterval> one{{0.0, 0.25}};
  // P{Bin(4, 1/4) >= 2} = 1 - (3/4)^4 - 4 (1/4)(3/4)^3.
  const double p2 = 1.0 - std::pow(0.75, 4) - std::pow(0.75, 3);
  const auto r = check_probability(e, one, ProbabilityMode::single_n, 2, mc(20000, 6));
  CHECK(covers(r, p2));
  CHECK(r.bound == doctest::Approx(1.0 / 2.0));
  CHECK(r.experiment == "probability-single-n2");

  const std::vector<HalfOpenInterval> pair{{0.0, 0.2}, {0.6, 0.8}};
  // Both intervals hit: 1 - 2 (0.8)^4 + (0.6)^4.
  const double both = 1.0 - 2.0 * std::pow(0.8, 4) + std::pow(0.6, 4);
  const auto pd = check_probability(e, pair, ProbabilityMode::pair_distance, 2,
                                    mc(20000, 6));
  CHECK(covers(pd, both));
  CHECK(pd.bound == doctest::Approx(0.2 * 0.8 * 16.0));
  CHECK(pd.pass);

  const std::vector<HalfOpenInterval> stairs{{0.0, 0.2}, {0.0, 0.5}};
  const auto st = check_probability(e, stairs, ProbabilityMode::staircase, 2,
                                    mc(5000, 6));
  CHECK(st.bound == doctest::Approx(0.2 * 0.5 * 16.0));
  CHECK(st.pass);

  CHECK_THROWS_AS(check_probability(e, pair, ProbabilityMode::single_n, 1, mc(10, 6)),
                  std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count") {
  const auto e = chain(12, Measure::cantor());
  const std::vector<HalfOpenInterval> ivs{{0.2, 0.5}, {0.0, 0.9}};
  const auto a = check_generalized(e, ivs, mc(1500, 7, 1));
  const auto b = check_generalized(e, ivs, mc(1500, 7, 3));
  CHECK(a.factorial.empirical == b.factorial.empirical);
  CHECK(a.observed_sigmas == b.observed_sigmas);
  const auto w1 = check_wegner(e, ivs[0], mc(1500, 7, 1));
  const auto w4 = check_wegner(e, ivs[0], mc(1500, 7, 4));
  CHECK(w1.empirical == w4.empirical);
  CHECK(w1.ci_low == w4.ci_low);
}

TEST_CASE("truncation of a compactly supported law changes nothing") {
  const auto e = chain(6, Measure::uniform(0, 1));
  const std::vector<HalfOpenInterval> iv{{0.1, 0.6}};
  const std::vector<double> cutoffs{2.0, 4.0};
  const auto t = truncation_convergence(e, StatisticKind::wegner, iv, cutoffs,
                                        mc(2000, 8));
  CHECK(t.baseline.experiment == "truncation-wegner-full");
  REQUIRE(t.points.size() == 2);
  for (const auto& p : t.points) {
    CHECK(p.difference == 0.0);
    CHECK(p.normalizer == 1.0);
  }
  CHECK(t.points[0].report.experiment == "truncation-wegner-M2");
}

TEST_CASE("truncated Gaussian converges within noise") {
  const auto e = chain(6, Measure::gaussian(0, 1));
  const std::vector<HalfOpenInterval> iv{{-0.5, 0.5}};
  const std::vector<double> cutoffs{1.0, 2.0, 4.0};
  const auto t = truncation_convergence(e, StatisticKind::wegner, iv, cutoffs,
                                        mc(4000, 9));
  CHECK(t.points.back().difference <= 2.0 * t.points.back().combined_radius);
  CHECK(t.points[0].normalizer > t.points[2].normalizer);
  for (const auto& p : t.points) CHECK(p.report.pass);
}
