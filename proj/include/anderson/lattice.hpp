#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anderson/measures.hpp"
#include "anderson/rng.hpp"

namespace anderson {

/// Real symmetric matrix in lower band storage: entry (i + k, i) for
/// 0 <= k <= bandwidth lives at band[k * n + i]. A dense matrix is the
/// special case bandwidth = n - 1.
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(std::size_t n, std::size_t bandwidth);

  static SymmetricBandMatrix from_dense(const Eigen::MatrixXd& dense);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return kd_; }

  /// Symmetric read access; zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;

  /// Writes both (i, j) and (j, i); |i - j| must be within the band.
  void set(std::size_t i, std::size_t j, double value);
  void add(std::size_t i, std::size_t j, double value);

  double diagonal(std::size_t i) const { return band_[i]; }
  std::span<double> diagonal_span() { return {band_.data(), n_}; }
  std::span<const double> diagonal_span() const { return {band_.data(), n_}; }

  /// Sub-diagonal k (entries (i + k, i)), length n - k.
  std::span<const double> subdiagonal(std::size_t k) const {
    return {band_.data() + k * n_, n_ - k};
  }

  std::span<const double> raw() const { return band_; }

  /// max_i sum_j |H_ij|.
  double norm_inf() const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> band_;
};

/// Box in Z^d. Sites are indexed with the first coordinate varying fastest,
/// so the slowest axis has stride |box| / sides.back(), which is the
/// bandwidth of a nearest-neighbour operator with simple boundaries.
class FiniteVolume {
 public:
  explicit FiniteVolume(std::vector<std::size_t> sides);

  std::size_t dimension() const { return sides_.size(); }
  const std::vector<std::size_t>& sides() const { return sides_; }
  std::size_t size() const { return size_; }

  std::size_t index(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coords(std::size_t index) const;
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

 private:
  std::vector<std::size_t> sides_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

enum class FreeKind { adjacency, laplacian, custom };
enum class Boundary { simple, periodic };

std::string to_string(FreeKind kind);
std::string to_string(Boundary boundary);

/// H_{0, Lambda}: adjacency (1 on nearest-neighbour pairs), the Laplacian
/// with diagonal (2d on the diagonal, -1 on pairs), or a caller-supplied
/// symmetric banded matrix.
class FreeOperator {
 public:
  FreeOperator(FreeKind kind, Boundary boundary)
      : kind_(kind), boundary_(boundary) {}
  static FreeOperator custom(SymmetricBandMatrix matrix);

  FreeKind kind() const { return kind_; }
  Boundary boundary() const { return boundary_; }

  /// The operator restricted to `volume`. Periodic boundaries produce a
  /// dense matrix.
  SymmetricBandMatrix matrix(const FiniteVolume& volume) const;

 private:
  FreeKind kind_;
  Boundary boundary_;
  SymmetricBandMatrix custom_;
};

/// omega_j for j in the box, in site-index order.
using PotentialConfig = std::vector<double>;

SymmetricBandMatrix assemble(const FiniteVolume& volume,
                             const FreeOperator& free,
                             std::span<const double> potential);

/// H_0 plus the potential on the diagonal, for a pre-built H_0.
SymmetricBandMatrix assemble(const SymmetricBandMatrix& free_matrix,
                             std::span<const double> potential);

/// One independent draw per site, consumed in site-index order.
PotentialConfig sample_potential(std::span<const Measure> measures,
                                 RandomStream& rng);

PotentialConfig replace_site(std::span<const double> potential,
                             std::size_t site, double value);

/// Box, background operator and one single-site law per site.
struct Ensemble {
  FiniteVolume volume;
  FreeOperator free;
  std::vector<Measure> measures;

  Ensemble(FiniteVolume v, FreeOperator f, std::vector<Measure> m);
  /// Same law at every site.
  Ensemble(FiniteVolume v, FreeOperator f, const Measure& m);

  std::size_t size() const { return volume.size(); }
  double q_lambda(double s) const;
};

}  // namespace anderson
