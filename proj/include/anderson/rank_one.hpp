#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "anderson/interval.hpp"
#include "anderson/measures.hpp"
#include "anderson/quadrature.hpp"
#include "anderson/rng.hpp"

namespace anderson {

inline constexpr std::size_t kRankOneMaxSize = 64;

/// H_omega = H0 + omega |phi><phi| on R^n, n <= 64.
class RankOneModel {
 public:
  RankOneModel(Eigen::MatrixXd h0, Eigen::VectorXd phi);

  /// Gaussian symmetric H0 with entries of variance 1/n and a uniformly
  /// distributed unit vector phi.
  static RankOneModel random(std::size_t n, RandomStream& rng);

  const Eigen::MatrixXd& h0() const { return h0_; }
  const Eigen::VectorXd& phi() const { return phi_; }
  std::size_t size() const { return static_cast<std::size_t>(phi_.size()); }

  /// Operator norm of H0.
  double norm() const;

  /// <phi, (H0 - z)^-1 phi> from the spectral decomposition of H0.
  std::complex<double> free_resolvent(std::complex<double> z) const;

  /// <phi, (H_omega - z)^-1 phi> by a direct complex solve.
  std::complex<double> direct_resolvent(double omega,
                                        std::complex<double> z) const;

  /// <phi, P_omega(I) phi>, diagonalizing H_omega.
  double projection_weight(double omega, const HalfOpenInterval& interval) const;

  /// The values of omega at which an eigenvalue of H_omega carrying weight
  /// on phi passes through an endpoint of the interval.
  std::vector<double> crossing_points(const HalfOpenInterval& interval) const;

 private:
  Eigen::MatrixXd h0_;
  Eigen::VectorXd phi_;
  Eigen::VectorXd levels_;   // eigenvalues of H0
  Eigen::VectorXd weights_;  // |<v_k, phi>|^2
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct ResolventSides {
  std::complex<double> direct;
  std::complex<double> identity;
};

ResolventSides rank_one_resolvent_sides(const RankOneModel& model, double omega,
                                        std::complex<double> z);

/// (<phi, (H0 - z)^-1 phi>^-1 + omega)^-1. Throws std::logic_error when the
/// direct solve disagrees by more than 1e-10 (1 + |value|).
std::complex<double> rank_one_resolvent(const RankOneModel& model, double omega,
                                        std::complex<double> z);

struct SpectralAverage {
  double value;
  double bound;
  double residual;
  std::size_t evaluations;
  bool pass;
};

/// int dmu(omega) <phi, P_omega(I) phi> against Q_mu(|I|).
SpectralAverage spectral_average(const RankOneModel& model,
                                 const Measure& measure,
                                 const HalfOpenInterval& interval,
                                 const QuadratureOptions& options = {});

struct LebesgueAverage {
  double lebesgue_value;
  double bound;
  double residual;
  bool pass;
};

/// int_{-W}^{W} d omega <phi, P_omega(I) phi> against |I|. The window must
/// satisfy W >= |H0| + max(|a|, |b|).
LebesgueAverage bounded_density_average(const RankOneModel& model,
                                        const HalfOpenInterval& interval,
                                        double window,
                                        const QuadratureOptions& options = {});

struct AbPair {
  double a;
  double b;
};

/// a - i b = (kappa / 2 eps) <phi, R0(E + i eps) phi>^-1; b >= kappa / 2 is
/// asserted.
AbPair ab_pair(const RankOneModel& model, double energy, double eps,
               double kappa);

struct ImResolventAverage {
  double lhs;
  double rhs;
  double residual;
  bool pass;
  /// <phi, P_omega(]E - eps, E + eps]) phi> <= 2 eps Im <phi, R_omega phi>
  /// at every checked omega.
  bool simpleineq_holds;
  std::size_t simpleineq_checked;
};

/// eps int dmu Im <phi, (H_omega - E - i eps)^-1 phi> against
/// pi (1 + kappa / 2) S_mu(2 eps / kappa).
ImResolventAverage averaged_im_resolvent(const RankOneModel& model,
                                         const Measure& measure, double energy,
                                         double eps, double kappa,
                                         const QuadratureOptions& options = {});

/// Closed form of the integrand of averaged_im_resolvent.
double im_resolvent_density(const AbPair& ab, double kappa, double eps,
                            double omega);

struct KappaScan {
  /// min over the grid of pi (2 + kappa) S(s / kappa), and its cap 3 pi S(s).
  double kappa_simple;
  double value_simple;
  double cap_simple;
  /// min over the grid of 4 (1 + kappa) S(s / kappa), and its cap 8 S(s).
  double kappa_refined;
  double value_refined;
  double cap_refined;
  bool pass;
};

/// Scans kappa over 2^-4, ..., 2^4.
KappaScan kappa_scan(const Measure& measure, double length);

}  // namespace anderson
