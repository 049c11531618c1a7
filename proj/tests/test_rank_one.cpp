#include "doctest.h"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "anderson/rank_one.hpp"

using namespace anderson;
using cd = std::complex<double>;

namespace {

RankOneModel scalar(double h) {
  return RankOneModel(Eigen::MatrixXd::Constant(1, 1, h),
                      Eigen::VectorXd::Ones(1));
}

cd dense_resolvent(const RankOneModel& m, double omega, cd z) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXcd a = (m.h0() + omega * m.phi() * m.phi().transpose()).cast<cd>();
  a -= z * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd inv = a.inverse();
  const Eigen::VectorXcd p = m.phi().cast<cd>();
  return p.dot(inv * p);
}

}  // namespace

TEST_CASE("one-dimensional resolvent identity") {
  const auto m = scalar(0.7);
  const cd z(0.2, 0.05);
  CHECK(std::abs(m.free_resolvent(z) - 1.0 / (0.7 - z)) < 1e-14);
  for (double omega : {-3.0, 0.0, 0.5, 10.0}) {
    const cd v = rank_one_resolvent(m, omega, z);
    CHECK(std::abs(v - 1.0 / (0.7 + omega - z)) < 1e-13);
  }
}

TEST_CASE("resolvent identity on random models") {
  RandomStream rng(41, 0);
  for (std::size_t n : {2u, 5u, 16u, 64u}) {
    const auto m = RankOneModel::random(n, rng);
    CHECK((m.h0() - m.h0().transpose()).norm() == 0.0);
    CHECK(m.phi().norm() == doctest::Approx(1.0).epsilon(1e-14));
    for (int t = 0; t < 20; ++t) {
      const double omega = 4.0 * rng.normal();
      const cd z(2.0 * rng.normal(), std::exp(-4.0 * rng.uniform()));
      const auto sides = rank_one_resolvent_sides(m, omega, z);
      const cd oracle = dense_resolvent(m, omega, z);
      CHECK(std::abs(sides.direct - oracle) <= 1e-9 * (1.0 + std::abs(oracle)));
      CHECK(std::abs(sides.identity - oracle) <= 1e-9 * (1.0 + std::abs(oracle)));
    }
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(rank_one_resolvent(scalar(0.0), 0.0, cd(0.0, -1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(RankOneModel(Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Ones(2)),
                  std::invalid_argument);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(RankOneModel(asym, Eigen::VectorXd::Unit(2, 0)), std::invalid_argument);
  RandomStream rng(42, 0);
  CHECK_THROWS_AS(RankOneModel::random(65, rng), std::invalid_argument);
}

TEST_CASE("spectral average examples") {
  const auto zero = scalar(0.0);
  const auto u = Measure::uniform(0, 1);
  auto r = spectral_average(zero, u, {0.0, 0.4});
  CHECK(r.value == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(r.bound == doctest::Approx(0.4));
  CHECK(r.pass);
  r = spectral_average(zero, u, {5.0, 6.0});
  CHECK(std::abs(r.value) < 1e-12);
  QuadratureOptions bad;
  bad.max_depth = 0;
  CHECK_THROWS_AS(spectral_average(zero, u, {0.0, 0.4}, bad), std::invalid_argument);
}

TEST_CASE("Cantor spectral average against Monte Carlo") {
  RandomStream rng(43, 0);
  const auto m = RankOneModel::random(8, rng);
  const auto c = Measure::cantor();
  const HalfOpenInterval iv(-0.3, 0.3);
  const auto r = spectral_average(m, c, iv);
  CHECK(r.value <= r.bound + 1e-9);
  CHECK(r.bound == doctest::Approx(8.0 * c.concentration(0.6)));
  RandomStream draws(43, 1);
  double sum = 0.0;
  const int samples = 20000;
  for (int i = 0; i < samples; ++i) sum += m.projection_weight(c.sample(draws), iv);
  // Values lie in [0, 1]; 5 standard errors at most 0.5 / sqrt(n) each.
  CHECK(std::abs(sum / samples - r.value) < 5.0 * 0.5 / std::sqrt(samples));
}

TEST_CASE("Lebesgue average equals |I| in one dimension") {
  const auto m = scalar(0.25);
  const HalfOpenInterval iv(-0.1, 0.4);
  const auto r = bounded_density_average(m, iv, 3.0);
  CHECK(r.lebesgue_value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.pass);
  CHECK_THROWS_AS(bounded_density_average(m, iv, 0.5), std::invalid_argument);

  RandomStream rng(44, 0);
  const auto four = RankOneModel::random(4, rng);
  const HalfOpenInterval j(-0.2, 0.3);
  const auto s = bounded_density_average(four, j, 10.0 * four.norm() + 1.0);
  CHECK(s.lebesgue_value <= 0.5 + 1e-6);
  CHECK(s.lebesgue_value >= 0.0);
}

TEST_CASE("a and b for a scalar model") {
  // a - i b = (kappa / 2 eps)(h - E - i eps).
  const auto m = scalar(0.7);
  const auto ab = ab_pair(m, 0.2, 0.1, 1.0);
  CHECK(ab.a == doctest::Approx(0.5 / 0.2).epsilon(1e-12));
  CHECK(ab.b == doctest::Approx(0.5).epsilon(1e-12));
  const auto ab2 = ab_pair(m, 0.2, 0.1, 3.0);
  CHECK(ab2.a == doctest::Approx(3.0 * ab.a).epsilon(1e-12));
  CHECK(ab2.b == doctest::Approx(3.0 * ab.b).epsilon(1e-12));
}

TEST_CASE("b never drops below kappa / 2") {
  RandomStream rng(45, 0);
  for (int t = 0; t < 1000; ++t) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 10);
    const auto m = RankOneModel::random(n, rng);
    const double kappa = std::exp2(8.0 * rng.uniform() - 4.0);
    const double eps = std::exp(-5.0 * rng.uniform());
    const auto ab = ab_pair(m, 2.0 * rng.normal(), eps, kappa);
    REQUIRE(ab.b >= kappa / 2.0 * (1.0 - 1e-12));
  }
}

TEST_CASE("closed form density is eps Im of the resolvent") {
  RandomStream rng(46, 0);
  const auto m = RankOneModel::random(6, rng);
  const double e = 0.1, eps = 0.05, kappa = 2.0;
  const auto ab = ab_pair(m, e, eps, kappa);
  for (double omega : {-2.0, -0.3, 0.0, 0.4, 1.7}) {
    const double direct = eps * std::imag(m.direct_resolvent(omega, cd(e, eps)));
    CHECK(im_resolvent_density(ab, kappa, eps, omega) ==
          doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("averaged imaginary part: arctan closed form for uniform(0,1)") {
  RandomStream rng(47, 0);
  const auto m = RankOneModel::random(5, rng);
  const auto u = Measure::uniform(0, 1);
  for (double eps : {0.2, 0.05, 0.01}) {
    for (double kappa : {0.5, 1.0, 4.0}) {
      const auto ab = ab_pair(m, 0.1, eps, kappa);
      const double exact =
          eps * (std::atan((ab.a + kappa / (2.0 * eps)) / ab.b) -
                 std::atan(ab.a / ab.b));
      const auto r = averaged_im_resolvent(m, u, 0.1, eps, kappa);
      CHECK(r.lhs == doctest::Approx(exact).epsilon(1e-8));
      CHECK(r.rhs == doctest::Approx(M_PI * (1.0 + kappa / 2.0) *
                                     std::min(1.0, 2.0 * eps / kappa)));
      CHECK(r.pass);
      CHECK(r.simpleineq_holds);
      CHECK(r.simpleineq_checked > 0);
    }
  }
}

TEST_CASE("averaged imaginary part for the Cantor measure") {
  RandomStream rng(48, 0);
  const auto m = RankOneModel::random(8, rng);
  const double eps = std::pow(3.0, -5) / 2.0;
  const auto r = averaged_im_resolvent(m, Measure::cantor(), 0.1, eps, 1.0);
  CHECK(r.rhs == doctest::Approx(M_PI * 1.5 * std::pow(2.0, -5)).epsilon(1e-12));
  CHECK(r.lhs <= r.rhs);
  CHECK(r.pass);
}

TEST_CASE("spectral averages stay below Q on random instances") {
  RandomStream rng(49, 0);
  const std::vector<Measure> zoo{Measure::uniform(0, 1), Measure::gaussian(0, 1),
                                 Measure::piecewise_constant({0, 0.5, 1}, {1, 3})};
  QuadratureOptions opts;
  opts.tolerance = 1e-8;
  for (int t = 0; t < 1000; ++t) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const auto m = RankOneModel::random(n, rng);
    const double a = 4.0 * rng.uniform() - 2.0;
    const HalfOpenInterval iv(a, a + std::pow(10.0, -3.0 * rng.uniform()));
    const auto& mu = zoo[t % zoo.size()];
    const auto r = spectral_average(m, mu, iv, opts);
    REQUIRE(r.value <= r.bound + 1e-7);
    REQUIRE(r.value >= -1e-9);
  }
}

TEST_CASE("spectral average is monotone in the interval") {
  RandomStream rng(50, 0);
  const auto m = RankOneModel::random(6, rng);
  const auto g = Measure::gaussian(0, 1);
  double prev = 0.0;
  for (double half : {0.05, 0.1, 0.3, 0.7, 1.5, 4.0}) {
    const auto r = spectral_average(m, g, {-half, half});
    CHECK(r.value >= prev - 1e-8);
    prev = r.value;
  }
}

TEST_CASE("crossing points are where the projection weight jumps") {
  RandomStream rng(51, 0);
  const auto m = RankOneModel::random(4, rng);
  const HalfOpenInterval iv(-0.2, 0.2);
  for (double c : m.crossing_points(iv)) {
    const double lo = m.projection_weight(c - 1e-6, iv);
    const double hi = m.projection_weight(c + 1e-6, iv);
    CHECK(std::abs(hi - lo) > 1e-4);
  }
}

TEST_CASE("kappa scan") {
  for (const auto& mu : {Measure::uniform(0, 1), Measure::cantor(),
                         Measure::gaussian(0, 1)}) {
    for (double s : {1e-3, 0.05, 0.3}) {
      const auto k = kappa_scan(mu, s);
      CHECK(k.pass);
      CHECK(k.value_simple <= k.cap_simple);
      CHECK(k.value_refined <= k.cap_refined);
      CHECK(k.cap_simple == doctest::Approx(3.0 * M_PI * mu.concentration(s)));
      const double lg = std::log2(k.kappa_simple);
      CHECK(lg == doctest::Approx(std::round(lg)));
      CHECK(std::abs(lg) <= 4.0);
    }
  }
}
