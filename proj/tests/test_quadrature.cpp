#include "doctest.h"

#include <cmath>

#include "anderson/quadrature.hpp"

using namespace anderson;

TEST_CASE("Lebesgue integrals of smooth and piecewise functions") {
  const std::vector<double> none;
  auto r = integrate_lebesgue([](double x) { return x * x; }, 0.0, 1.0, none);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

  r = integrate_lebesgue([](double x) { return std::cos(x); }, 0.0, M_PI / 2, none);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));

  const std::vector<double> jump{0.3};
  const auto step = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
  r = integrate_lebesgue(step, 0.0, 1.0, jump);
  CHECK(r.value == doctest::Approx(0.3 + 5.0 * 0.7).epsilon(1e-10));
  CHECK(r.residual < 1e-9);
}

TEST_CASE("moments of the Cantor measure") {
  const auto m = Measure::cantor();
  const std::vector<double> none;
  auto r = integrate_measure(m, [](double) { return 1.0; }, none);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  r = integrate_measure(m, [](double x) { return x; }, none);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
  r = integrate_measure(m, [](double x) { return x * x; }, none);
  CHECK(r.value == doctest::Approx(3.0 / 8.0).epsilon(1e-9));
  const std::vector<double> cut{1.0 / 3.0};
  r = integrate_measure(m, [](double x) { return x <= 1.0 / 3.0 ? 1.0 : 0.0; }, cut);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("Cantor moment generating function and an interior jump") {
  // E exp(tX) = exp(t / 2) prod_k cosh(t / 3^k).
  double exact = std::exp(0.5);
  for (int k = 1; k < 40; ++k) exact *= std::cosh(std::pow(3.0, -k));
  const std::vector<double> none;
  auto r = integrate_measure(Measure::cantor(), [](double x) { return std::exp(x); },
                             none);
  CHECK(r.converged);
  CHECK(std::abs(r.value - exact) < 1e-9);
  // 1/4 = 0.0202..._3, so F(1/4) = 0.0101..._2 = 1/3.
  const std::vector<double> cut{0.25};
  r = integrate_measure(Measure::cantor(), [](double x) { return x <= 0.25 ? 1.0 : 0.0; },
                        cut);
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-9);
}

TEST_CASE("moments of density families") {
  const std::vector<double> none;
  const auto sq = [](double x) { return x * x; };
  auto r = integrate_measure(Measure::gaussian(1.0, 2.0), sq, none);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-8));
  r = integrate_measure(Measure::uniform(-1, 3), [](double x) { return x; }, none);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  // Heights 1 and 3 on halves of [0,1]: mass 1/4 and 3/4.
  const auto p = Measure::piecewise_constant({0, 0.5, 1}, {1, 3});
  r = integrate_measure(p, [](double x) { return x; }, none);
  CHECK(r.value == doctest::Approx(0.25 * 0.25 + 0.75 * 0.75).epsilon(1e-10));
  const auto t = truncate(Measure::gaussian(0, 1), 1.0);
  r = integrate_measure(t, [](double) { return 1.0; }, none);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  r = integrate_measure(t, sq, none);
  // Variance of the standard normal restricted to [-1, 1].
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  const double mass = std::erf(1.0 / std::sqrt(2.0));
  CHECK(r.value == doctest::Approx(1.0 - 2.0 * phi1 / mass).epsilon(1e-8));
  const auto tc = truncate(Measure::cantor(), 0.5);
  r = integrate_measure(tc, [](double) { return 1.0; }, none);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unresolved integrands report a residual") {
  QuadratureOptions opts;
  opts.max_depth = 2;
  opts.initial_cells = 1;
  const std::vector<double> none;
  const auto r = integrate_lebesgue(
      [](double x) { return std::sin(200.0 * x); }, 0.0, 1.0, none, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.residual > 0.0);
}
