#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "anderson/eigencount.hpp"

using namespace anderson;

namespace {

SymmetricBandMatrix diag(std::vector<double> d) {
  SymmetricBandMatrix h(d.size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) h.set(i, i, d[i]);
  return h;
}

SymmetricBandMatrix path(std::size_t n) {
  return FreeOperator(FreeKind::adjacency, Boundary::simple).matrix(FiniteVolume({n}));
}

SymmetricBandMatrix random_band(RandomStream& rng, std::size_t n, std::size_t kd) {
  SymmetricBandMatrix h(n, kd);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k <= kd && j + k < n; ++k) h.set(j + k, j, rng.normal());
  }
  return h;
}

}  // namespace

TEST_CASE("diagonal counting and the <= convention") {
  const auto h = diag({1, 2, 3});
  CHECK(inertia_leq(h, 2.5) == 2);
  CHECK(inertia_leq(h, 2.0) == 2);
  CHECK(count_in_interval(h, {0, 3}) == 3);
  CHECK(count_in_interval(h, {1, 2}) == 1);
}

TEST_CASE("path graph eigenvalues 2 cos(k pi / (n + 1))") {
  const auto h = path(3);
  CHECK(inertia_leq(h, 1.0) == 2);
  CHECK(count_in_interval(h, {-1, 1.5}) == 2);
  const auto spec = full_spectrum(h);
  CHECK(spec[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-10));
  CHECK(std::abs(spec[1]) < 1e-10);
  CHECK(spec[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  for (std::size_t n : {10u, 33u, 64u}) {
    const auto s = full_spectrum(path(n));
    for (std::size_t k = 1; k <= n; ++k) {
      CHECK(s[n - k] == doctest::Approx(2.0 * std::cos(k * M_PI / (n + 1))).epsilon(1e-10));
    }
  }
}

TEST_CASE("full spectrum small cases") {
  CHECK(full_spectrum(diag({3, 1, 2})) == std::vector<double>{1, 2, 3});
  Eigen::Matrix2d m;
  m << 0, 1, 1, 0;
  const auto s = full_spectrum(SymmetricBandMatrix::from_dense(m));
  CHECK(s[0] == doctest::Approx(-1.0));
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(full_spectrum(path(100), 50), std::length_error);
}

TEST_CASE("nothing above the spectral radius") {
  RandomStream rng(31, 0);
  const auto h = random_band(rng, 20, 3);
  const double r = h.norm_inf();
  CHECK(count_in_interval(h, {r, r + 1}) == 0);
  CHECK(count_in_interval(h, {-r - 1, r}) == 20);
}

TEST_CASE("inertia count equals the dense diagonalization count") {
  RandomStream rng(32, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 64);
    const std::size_t kd = std::min<std::size_t>(n - 1, rng.uniform() * 10);
    const auto h = random_band(rng, n, kd);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.to_dense(),
                                                       Eigen::EigenvaluesOnly)
            .eigenvalues();
    for (int i = 0; i < 10; ++i) {
      const double a = 4.0 * rng.normal();
      const HalfOpenInterval iv(a, a + 3.0 * rng.uniform_pos());
      std::size_t expected = 0;
      for (Eigen::Index k = 0; k < ev.size(); ++k) expected += iv.contains(ev(k));
      REQUIRE(count_in_interval(h, iv) == expected);
    }
  }
}

TEST_CASE("inertia is monotone and counts are additive") {
  RandomStream rng(33, 0);
  const auto h = random_band(rng, 40, 4);
  std::size_t prev = 0;
  for (double e = -12; e <= 12; e += 0.01) {
    const auto c = inertia_leq(h, e);
    REQUIRE(c >= prev);
    prev = c;
  }
  for (int i = 0; i < 200; ++i) {
    double x[3] = {3 * rng.normal(), 3 * rng.normal(), 3 * rng.normal()};
    std::sort(x, x + 3);
    if (!(x[0] < x[1] && x[1] < x[2])) continue;
    CHECK(count_in_interval(h, {x[0], x[2]}) ==
          count_in_interval(h, {x[0], x[1]}) + count_in_interval(h, {x[1], x[2]}));
  }
}

TEST_CASE("exact eigenvalue endpoints follow the half-open convention") {
  // Integer matrices with integer eigenvalues hit zero pivots.
  const auto h = diag({0, 0, 1, 1, 1, 2});
  CHECK(inertia_leq(h, 0.0) == 2);
  CHECK(inertia_leq(h, 1.0) == 5);
  CHECK(count_in_interval(h, {0, 1}) == 3);
  Eigen::Matrix3d m;
  m << 1, 1, 0, 1, 1, 0, 0, 0, 3;  // eigenvalues 0, 2, 3
  const auto b = SymmetricBandMatrix::from_dense(m);
  CHECK(inertia_leq(b, 0.0) == 1);
  CHECK(inertia_leq(b, 2.0) == 2);
  CHECK(count_in_interval(b, {0.0, 2.0}) == 1);
}

TEST_CASE("count_in_intervals matches single calls") {
  RandomStream rng(34, 0);
  const auto h = random_band(rng, 30, 2);
  const std::vector<HalfOpenInterval> ivs{{-1, 0}, {0, 1}, {-1, 1}, {-0.5, 2}};
  const auto counts = count_in_intervals(h, ivs);
  for (std::size_t k = 0; k < ivs.size(); ++k) CHECK(counts[k] == count_in_interval(h, ivs[k]));
}

TEST_CASE("interlacing examples") {
  Eigen::Matrix2d m;
  m << 0, 1, 1, 0;
  const auto free = SymmetricBandMatrix::from_dense(m);
  const std::vector<double> zero(2, 0.0);
  const auto r = interlacing_check(free, zero, 0, 0.0, 10.0, {-2, 0});
  CHECK(r.count_s == 1);
  CHECK(r.count_t == 1);
  CHECK(r.holds);

  const auto same = interlacing_check(free, zero, 1, 0.3, 0.3, {-2, 0.5});
  CHECK(same.count_s == same.count_t);
  CHECK(same.holds);

  const auto scalar = SymmetricBandMatrix(1, 0);
  const std::vector<double> one(1, 0.0);
  const auto sat = interlacing_check(scalar, one, 0, 0.0, 1.0, {-1, 0});
  CHECK(sat.count_s == 1);
  CHECK(sat.count_t == 0);
  CHECK(sat.holds);

  CHECK_THROWS_AS(interlacing_check(free, zero, 0, 1.0, 0.0, {-2, 0}),
                  std::invalid_argument);
}

TEST_CASE("interlacing holds on random configurations") {
  RandomStream rng(35, 0);
  std::size_t violations = 0;
  for (int c = 0; c < 10000; ++c) {
    const std::size_t sx = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    const std::size_t sy = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    const FiniteVolume v({sx, sy});
    const FreeOperator free(rng.coin() ? FreeKind::adjacency : FreeKind::laplacian,
                            rng.coin() ? Boundary::simple : Boundary::periodic);
    std::vector<double> w(v.size());
    for (auto& x : w) x = rng.uniform();
    const auto j = static_cast<std::size_t>(rng.uniform() * v.size());
    const double s = rng.uniform();
    const double t = s + rng.uniform();
    const double a = 6 * rng.uniform() - 2;
    const HalfOpenInterval iv(a, a + rng.uniform_pos());
    violations += !interlacing_check(v, free, w, j, s, t, iv).holds;
  }
  CHECK(violations == 0);
}
