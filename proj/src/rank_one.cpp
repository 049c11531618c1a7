#include "anderson/rank_one.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace anderson {

namespace {

using Complex = std::complex<double>;

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

void require_converged(const QuadratureResult& r, const QuadratureOptions& o,
                       const char* what) {
  if (!r.converged) {
    throw QuadratureError(std::string(what) +
                              ": quadrature did not converge at max depth " +
                              std::to_string(o.max_depth) + ", residual " +
                              std::to_string(r.residual),
                          r.residual);
  }
}

void check_options(const QuadratureOptions& options) {
  if (options.max_depth < 1) {
    throw std::invalid_argument("quadrature depth must be at least 1");
  }
  if (!(options.tolerance > 0.0)) {
    throw std::invalid_argument("quadrature tolerance must be positive");
  }
}

}  // namespace

RankOneModel::RankOneModel(Eigen::MatrixXd h0, Eigen::VectorXd phi)
    : h0_(std::move(h0)), phi_(std::move(phi)) {
  const auto n = phi_.size();
  if (n == 0 || static_cast<std::size_t>(n) > kRankOneMaxSize) {
    throw std::invalid_argument("rank-one model size must be in [1, 64]");
  }
  if (h0_.rows() != n || h0_.cols() != n) {
    throw std::invalid_argument("H0 and phi dimensions differ");
  }
  const double scale = 1.0 + h0_.cwiseAbs().maxCoeff();
  if ((h0_ - h0_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("H0 is not symmetric");
  }
  if (std::abs(phi_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("phi must be a unit vector");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h0_);
  levels_ = solver.eigenvalues();
  weights_ = (solver.eigenvectors().transpose() * phi_).array().square();
}

RankOneModel RankOneModel::random(std::size_t n, RandomStream& rng) {
  if (n == 0 || n > kRankOneMaxSize) {
    throw std::invalid_argument("rank-one model size must be in [1, 64]");
  }
  const auto m = static_cast<Eigen::Index>(n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j; i < m; ++i) {
      h(i, j) = h(j, i) = s * rng.normal();
    }
  }
  Eigen::VectorXd phi(m);
  do {
    for (Eigen::Index i = 0; i < m; ++i) phi(i) = rng.normal();
  } while (phi.norm() == 0.0);
  phi.normalize();
  return RankOneModel(std::move(h), std::move(phi));
}

double RankOneModel::norm() const {
  return std::max(std::abs(levels_(0)), std::abs(levels_(levels_.size() - 1)));
}

Complex RankOneModel::free_resolvent(Complex z) const {
  Complex sum = 0.0;
  for (Eigen::Index k = 0; k < levels_.size(); ++k) {
    sum += weights_(k) / (levels_(k) - z);
  }
  return sum;
}

Complex RankOneModel::direct_resolvent(double omega, Complex z) const {
  const auto n = phi_.size();
  Eigen::MatrixXcd m = (h0_ + omega * phi_ * phi_.transpose()).cast<Complex>();
  m.diagonal().array() -= z;
  const Eigen::VectorXcd rhs = phi_.cast<Complex>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(rhs);
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += phi_(i) * x(i);
  return sum;
}

double RankOneModel::projection_weight(double omega,
                                       const HalfOpenInterval& interval) const {
  const Eigen::MatrixXd h = h0_ + omega * phi_ * phi_.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::VectorXd overlap = solver.eigenvectors().transpose() * phi_;
  double weight = 0.0;
  for (Eigen::Index k = 0; k < overlap.size(); ++k) {
    if (interval.contains(solver.eigenvalues()(k))) {
      weight += overlap(k) * overlap(k);
    }
  }
  return weight;
}

std::vector<double> RankOneModel::crossing_points(
    const HalfOpenInterval& interval) const {
  // c is an eigenvalue of H_omega iff 1 + omega <phi, (H0 - c)^-1 phi> = 0.
  std::vector<double> out;
  for (double c : {interval.a(), interval.b()}) {
    double f = 0.0;
    bool pole = false;
    for (Eigen::Index k = 0; k < levels_.size(); ++k) {
      if (weights_(k) == 0.0) continue;
      const double gap = levels_(k) - c;
      if (std::abs(gap) <= 1e-14 * (1.0 + std::abs(c))) {
        pole = true;
        break;
      }
      f += weights_(k) / gap;
    }
    if (pole) {
      out.push_back(0.0);
    } else if (f != 0.0) {
      out.push_back(-1.0 / f);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ResolventSides rank_one_resolvent_sides(const RankOneModel& model, double omega,
                                        Complex z) {
  if (!(z.imag() > 0.0)) {
    throw std::invalid_argument("rank-one resolvent needs Im z > 0");
  }
  const Complex identity = 1.0 / (1.0 / model.free_resolvent(z) + omega);
  return {model.direct_resolvent(omega, z), identity};
}

Complex rank_one_resolvent(const RankOneModel& model, double omega, Complex z) {
  const auto sides = rank_one_resolvent_sides(model, omega, z);
  if (std::abs(sides.direct - sides.identity) >
      1e-10 * (1.0 + std::abs(sides.identity))) {
    throw std::logic_error("rank-one resolvent identity violated");
  }
  return sides.identity;
}

SpectralAverage spectral_average(const RankOneModel& model,
                                 const Measure& measure,
                                 const HalfOpenInterval& interval,
                                 const QuadratureOptions& options) {
  check_options(options);
  const auto breaks = model.crossing_points(interval);
  const auto r = integrate_measure(
      measure,
      [&](double omega) { return model.projection_weight(omega, interval); },
      breaks, options);
  require_converged(r, options, "spectral_average");
  const double bound = measure.q(interval.length());
  return {r.value, bound, r.residual, r.evaluations,
          r.value <= bound + options.tolerance};
}

LebesgueAverage bounded_density_average(const RankOneModel& model,
                                        const HalfOpenInterval& interval,
                                        double window,
                                        const QuadratureOptions& options) {
  check_options(options);
  const double needed =
      model.norm() + std::max(std::abs(interval.a()), std::abs(interval.b()));
  if (!(window >= needed)) {
    throw std::invalid_argument("window [-W, W] too small: need W >= " +
                                std::to_string(needed));
  }
  const auto breaks = model.crossing_points(interval);
  const auto r = integrate_lebesgue(
      [&](double omega) { return model.projection_weight(omega, interval); },
      -window, window, breaks, options);
  require_converged(r, options, "bounded_density_average");
  const double bound = interval.length();
  return {r.value, bound, r.residual, r.value <= bound + options.tolerance};
}

AbPair ab_pair(const RankOneModel& model, double energy, double eps,
               double kappa) {
  require_positive(eps, "eps");
  require_positive(kappa, "kappa");
  const Complex g = model.free_resolvent({energy, eps});
  if (g == 0.0) throw std::logic_error("<phi, R0 phi> vanished");
  const Complex v = (kappa / (2.0 * eps)) / g;
  const AbPair out{v.real(), -v.imag()};
  if (out.b < 0.5 * kappa * (1.0 - 1e-12)) {
    throw std::logic_error("b < kappa / 2");
  }
  return out;
}

double im_resolvent_density(const AbPair& ab, double kappa, double eps,
                            double omega) {
  const double shift = ab.a + kappa / (2.0 * eps) * omega;
  return 0.5 * kappa * ab.b / (shift * shift + ab.b * ab.b);
}

ImResolventAverage averaged_im_resolvent(const RankOneModel& model,
                                         const Measure& measure, double energy,
                                         double eps, double kappa,
                                         const QuadratureOptions& options) {
  check_options(options);
  const AbPair ab = ab_pair(model, energy, eps, kappa);
  // The integrand peaks where a + kappa omega / (2 eps) = 0.
  const double peak = -2.0 * eps * ab.a / kappa;
  const std::vector<double> breaks{peak};
  const auto r = integrate_measure(
      measure,
      [&](double omega) { return im_resolvent_density(ab, kappa, eps, omega); },
      breaks, options);
  require_converged(r, options, "averaged_im_resolvent");

  ImResolventAverage out{};
  out.lhs = r.value;
  out.rhs = std::numbers::pi * (1.0 + 0.5 * kappa) *
            measure.concentration(2.0 * eps / kappa);
  out.residual = r.residual;
  out.pass = out.lhs <= out.rhs + options.tolerance;

  const HalfOpenInterval window(energy - eps, energy + eps);
  RandomStream rng(0x5eed, 0);
  out.simpleineq_holds = true;
  constexpr std::size_t kChecks = 256;
  for (std::size_t i = 0; i < kChecks; ++i) {
    const double omega = i == 0 ? peak : measure.sample(rng);
    const double p = model.projection_weight(omega, window);
    const double im = rank_one_resolvent(model, omega, {energy, eps}).imag();
    if (p > 2.0 * eps * im + 1e-12) out.simpleineq_holds = false;
  }
  out.simpleineq_checked = kChecks;
  out.pass = out.pass && out.simpleineq_holds;
  return out;
}

KappaScan kappa_scan(const Measure& measure, double length) {
  require_positive(length, "interval length");
  KappaScan out{};
  out.value_simple = out.value_refined = std::numeric_limits<double>::infinity();
  for (int e = -4; e <= 4; ++e) {
    const double kappa = std::ldexp(1.0, e);
    const double s = measure.concentration(length / kappa);
    const double simple = std::numbers::pi * (2.0 + kappa) * s;
    const double refined = 4.0 * (1.0 + kappa) * s;
    if (simple < out.value_simple) {
      out.value_simple = simple;
      out.kappa_simple = kappa;
    }
    if (refined < out.value_refined) {
      out.value_refined = refined;
      out.kappa_refined = kappa;
    }
  }
  const double s = measure.concentration(length);
  out.cap_simple = 3.0 * std::numbers::pi * s;
  out.cap_refined = 8.0 * s;
  out.pass = out.value_simple <= out.cap_simple * (1.0 + 1e-12) &&
             out.value_refined <= out.cap_refined * (1.0 + 1e-12);
  return out;
}

}  // namespace anderson
