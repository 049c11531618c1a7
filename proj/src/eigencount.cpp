#include "anderson/eigencount.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace anderson {

namespace {

constexpr double kShiftRel = 0x1.0p-40;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kShiftAttempts = 4;

// Negative pivot count of H - energy for bandwidth <= 1; nullopt when a pivot
// is within `tiny` of zero.
std::optional<std::size_t> sturm_count(const SymmetricBandMatrix& h,
                                       double energy, double tiny,
                                       bool force) {
  const std::size_t n = h.size();
  const auto diag = h.diagonal_span();
  const bool tri = h.bandwidth() > 0;
  const double* off = tri ? h.subdiagonal(1).data() : nullptr;
  std::size_t negatives = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = diag[i] - energy;
    q = (i > 0 && tri) ? d - off[i - 1] * off[i - 1] / q : d;
    if (!(std::abs(q) > tiny)) {
      if (!force) return std::nullopt;
      q = -tiny;
    }
    if (q < 0.0) ++negatives;
  }
  return negatives;
}

// Band L D L^T of H - energy without pivoting.
std::optional<std::size_t> band_ldlt_count(const SymmetricBandMatrix& h,
                                           double energy, double tiny,
                                           bool force) {
  const std::size_t n = h.size();
  const std::size_t kd = h.bandwidth();
  std::vector<double> w(h.raw().begin(), h.raw().end());
  for (std::size_t j = 0; j < n; ++j) w[j] -= energy;
  // w[k * n + j] holds entry (j + k, j) of the trailing Schur complement.
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return w[(i - j) * n + j];
  };
  std::vector<double> col(kd + 1);
  std::size_t negatives = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = at(j, j);
    if (!(std::abs(d) > tiny)) {
      if (!force) return std::nullopt;
      d = -tiny;
    }
    if (d < 0.0) ++negatives;
    const std::size_t last = std::min(n - 1, j + kd);
    const std::size_t m = last - j;
    for (std::size_t r = 1; r <= m; ++r) col[r] = at(j + r, j);
    for (std::size_t c = 1; c <= m; ++c) {
      const double lc = col[c] / d;
      if (lc == 0.0) continue;
      for (std::size_t r = c; r <= m; ++r) at(j + r, j + c) -= col[r] * lc;
    }
  }
  return negatives;
}

std::size_t count_with_shift(const SymmetricBandMatrix& h, double energy) {
  if (!std::isfinite(energy)) {
    return energy > 0.0 ? h.size() : 0;
  }
  const double norm = h.norm_inf();
  const auto run = [&](double e, bool force) {
    const double tiny = kEps * (norm + std::abs(e)) * 1e-3 +
                        std::numeric_limits<double>::min();
    return h.bandwidth() <= 1 ? sturm_count(h, e, tiny, force)
                              : band_ldlt_count(h, e, tiny, force);
  };
  double e = energy;
  for (int attempt = 0; attempt < kShiftAttempts; ++attempt) {
    if (auto c = run(e, false)) return *c;
    // Always an upward move: E (1 + rel) + rel ||H|| for E >= 0, and the
    // same magnitude for negative E.
    const double scale = static_cast<double>(1 << attempt);
    e = energy + scale * kShiftRel * (std::abs(energy) + norm);
  }
  return *run(e, true);
}

}  // namespace

std::size_t inertia_leq(const SymmetricBandMatrix& h, double energy) {
  if (h.size() == 0) return 0;
  return count_with_shift(h, energy);
}

std::size_t count_in_interval(const SymmetricBandMatrix& h,
                              const HalfOpenInterval& interval) {
  const std::size_t upper = inertia_leq(h, interval.b());
  const std::size_t lower = inertia_leq(h, interval.a());
  return upper >= lower ? upper - lower : 0;
}

std::vector<std::size_t> count_in_intervals(
    const SymmetricBandMatrix& h,
    std::span<const HalfOpenInterval> intervals) {
  std::map<double, std::size_t> at;
  for (const auto& iv : intervals) {
    at.emplace(iv.a(), 0);
    at.emplace(iv.b(), 0);
  }
  for (auto& [e, c] : at) c = inertia_leq(h, e);
  std::vector<std::size_t> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) {
    const std::size_t upper = at[iv.b()];
    const std::size_t lower = at[iv.a()];
    out.push_back(upper >= lower ? upper - lower : 0);
  }
  return out;
}

std::vector<double> full_spectrum(const SymmetricBandMatrix& h,
                                  std::size_t dense_cap) {
  const std::size_t n = h.size();
  if (n > dense_cap) {
    throw std::length_error(
        "full_spectrum: size " + std::to_string(n) + " exceeds the dense cap " +
        std::to_string(dense_cap) +
        "; use inertia_leq/count_in_interval for eigenvalue counts");
  }
  if (n == 0) return {};
  Eigen::VectorXd evals;
  if (h.bandwidth() <= 1) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (std::size_t i = 0; i < n; ++i) {
      diag(static_cast<Eigen::Index>(i)) = h.diagonal(i);
    }
    if (h.bandwidth() == 1) {
      const auto off = h.subdiagonal(1);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        sub(static_cast<Eigen::Index>(i)) = off[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("full_spectrum: tridiagonal QL did not converge");
    }
    evals = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        h.to_dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("full_spectrum: symmetric QR did not converge");
    }
    evals = solver.eigenvalues();
  }
  std::vector<double> out(evals.data(), evals.data() + evals.size());
  std::sort(out.begin(), out.end());
  return out;
}

InterlacingResult interlacing_check(const SymmetricBandMatrix& free_matrix,
                                    std::span<const double> potential,
                                    std::size_t site, double s, double t,
                                    const HalfOpenInterval& interval) {
  if (s > t) {
    throw std::invalid_argument("interlacing_check requires s <= t");
  }
  const auto hs = assemble(free_matrix, replace_site(potential, site, s));
  const auto ht = assemble(free_matrix, replace_site(potential, site, t));
  InterlacingResult r{count_in_interval(hs, interval),
                      count_in_interval(ht, interval), false};
  r.holds = r.count_s <= 1 + r.count_t;
  return r;
}

InterlacingResult interlacing_check(const FiniteVolume& volume,
                                    const FreeOperator& free,
                                    std::span<const double> potential,
                                    std::size_t site, double s, double t,
                                    const HalfOpenInterval& interval) {
  if (potential.size() != volume.size()) {
    throw std::invalid_argument("interlacing_check: potential size mismatch");
  }
  return interlacing_check(free.matrix(volume), potential, site, s, t,
                           interval);
}

}  // namespace anderson
