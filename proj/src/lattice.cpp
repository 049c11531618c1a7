#include "anderson/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anderson {

SymmetricBandMatrix::SymmetricBandMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), kd_(n == 0 ? 0 : std::min(bandwidth, n - 1)),
      band_((kd_ + 1) * n, 0.0) {}

SymmetricBandMatrix SymmetricBandMatrix::from_dense(
    const Eigen::MatrixXd& dense) {
  if (dense.rows() != dense.cols()) {
    throw std::invalid_argument("from_dense: matrix must be square");
  }
  const auto n = static_cast<std::size_t>(dense.rows());
  std::size_t kd = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (dense(ii, jj) != dense(jj, ii)) {
        throw std::invalid_argument("from_dense: matrix is not symmetric");
      }
      if (dense(ii, jj) != 0.0) kd = std::max(kd, i - j);
    }
  }
  SymmetricBandMatrix out(n, kd);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i <= std::min(n - 1, j + kd); ++i) {
      out.band_[(i - j) * n + j] =
          dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

double SymmetricBandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  const std::size_t k = i - j;
  if (k > kd_) return 0.0;
  return band_[k * n_ + j];
}

void SymmetricBandMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > kd_) {
    throw std::out_of_range("SymmetricBandMatrix::set outside the band");
  }
  band_[(i - j) * n_ + j] = value;
}

void SymmetricBandMatrix::add(std::size_t i, std::size_t j, double value) {
  set(i, j, (*this)(i, j) + value);
}

double SymmetricBandMatrix::norm_inf() const {
  std::vector<double> rows(n_, 0.0);
  for (std::size_t k = 0; k <= kd_; ++k) {
    for (std::size_t j = 0; j + k < n_; ++j) {
      const double v = std::abs(band_[k * n_ + j]);
      rows[j + k] += v;
      if (k > 0) rows[j] += v;
    }
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

Eigen::MatrixXd SymmetricBandMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k <= kd_; ++k) {
    for (std::size_t j = 0; j + k < n_; ++j) {
      const double v = band_[k * n_ + j];
      out(static_cast<Eigen::Index>(j + k), static_cast<Eigen::Index>(j)) = v;
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j + k)) = v;
    }
  }
  return out;
}

FiniteVolume::FiniteVolume(std::vector<std::size_t> sides)
    : sides_(std::move(sides)) {
  if (sides_.empty()) {
    throw std::invalid_argument("FiniteVolume: dimension must be >= 1");
  }
  strides_.reserve(sides_.size());
  for (std::size_t s : sides_) {
    if (s == 0) throw std::invalid_argument("FiniteVolume: sides must be >= 1");
    strides_.push_back(size_);
    size_ *= s;
  }
}

std::size_t FiniteVolume::index(std::span<const std::size_t> coords) const {
  if (coords.size() != sides_.size()) {
    throw std::invalid_argument("FiniteVolume::index: wrong dimension");
  }
  std::size_t idx = 0;
  for (std::size_t a = 0; a < sides_.size(); ++a) {
    if (coords[a] >= sides_[a]) {
      throw std::out_of_range("FiniteVolume::index: coordinate out of range");
    }
    idx += coords[a] * strides_[a];
  }
  return idx;
}

std::vector<std::size_t> FiniteVolume::coords(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("FiniteVolume::coords");
  std::vector<std::size_t> out(sides_.size());
  for (std::size_t a = 0; a < sides_.size(); ++a) {
    out[a] = index % sides_[a];
    index /= sides_[a];
  }
  return out;
}

std::string to_string(FreeKind kind) {
  switch (kind) {
    case FreeKind::adjacency:
      return "adjacency";
    case FreeKind::laplacian:
      return "laplacian";
    case FreeKind::custom:
      return "custom";
  }
  return "?";
}

std::string to_string(Boundary boundary) {
  return boundary == Boundary::simple ? "simple" : "periodic";
}

FreeOperator FreeOperator::custom(SymmetricBandMatrix matrix) {
  FreeOperator op(FreeKind::custom, Boundary::simple);
  op.custom_ = std::move(matrix);
  return op;
}

SymmetricBandMatrix FreeOperator::matrix(const FiniteVolume& volume) const {
  const std::size_t n = volume.size();
  if (kind_ == FreeKind::custom) {
    if (custom_.size() != n) {
      throw std::invalid_argument("custom free operator has size " +
                                  std::to_string(custom_.size()) +
                                  ", volume has " + std::to_string(n));
    }
    return custom_;
  }

  std::size_t kd = 0;
  if (boundary_ == Boundary::periodic) {
    kd = n == 0 ? 0 : n - 1;
  } else {
    for (std::size_t a = 0; a < volume.dimension(); ++a) {
      if (volume.sides()[a] > 1) kd = std::max(kd, volume.stride(a));
    }
  }
  SymmetricBandMatrix h(n, kd);
  const double hop = kind_ == FreeKind::adjacency ? 1.0 : -1.0;
  const double diag =
      kind_ == FreeKind::adjacency ? 0.0 : 2.0 * static_cast<double>(volume.dimension());

  for (std::size_t i = 0; i < n; ++i) h.set(i, i, diag);
  // Each unordered nearest-neighbour pair is visited once through its
  // "+1" direction; with periodic wrap and side 2 (or 1) both directions of
  // an axis reach the same site and the entries add up.
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = volume.coords(i);
    for (std::size_t a = 0; a < volume.dimension(); ++a) {
      const std::size_t side = volume.sides()[a];
      if (c[a] + 1 < side) {
        h.add(i, i + volume.stride(a), hop);
      } else if (boundary_ == Boundary::periodic) {
        // Wrap edge from the last slice to the first one.
        const std::size_t j = i - c[a] * volume.stride(a);
        if (j == i) {
          h.add(i, i, 2.0 * hop);
        } else {
          h.add(i, j, hop);
        }
      }
    }
  }
  return h;
}

SymmetricBandMatrix assemble(const SymmetricBandMatrix& free_matrix,
                             std::span<const double> potential) {
  if (potential.size() != free_matrix.size()) {
    throw std::invalid_argument(
        "assemble: potential has " + std::to_string(potential.size()) +
        " entries, operator has size " + std::to_string(free_matrix.size()));
  }
  SymmetricBandMatrix h = free_matrix;
  auto diag = h.diagonal_span();
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += potential[i];
  return h;
}

SymmetricBandMatrix assemble(const FiniteVolume& volume,
                             const FreeOperator& free,
                             std::span<const double> potential) {
  if (potential.size() != volume.size()) {
    throw std::invalid_argument(
        "assemble: potential has " + std::to_string(potential.size()) +
        " entries, volume has " + std::to_string(volume.size()) + " sites");
  }
  return assemble(free.matrix(volume), potential);
}

PotentialConfig sample_potential(std::span<const Measure> measures,
                                 RandomStream& rng) {
  PotentialConfig out;
  out.reserve(measures.size());
  for (const Measure& m : measures) out.push_back(m.sample(rng));
  return out;
}

PotentialConfig replace_site(std::span<const double> potential,
                             std::size_t site, double value) {
  if (site >= potential.size()) {
    throw std::out_of_range("replace_site: site " + std::to_string(site) +
                            " outside a box of " +
                            std::to_string(potential.size()) + " sites");
  }
  PotentialConfig out(potential.begin(), potential.end());
  out[site] = value;
  return out;
}

Ensemble::Ensemble(FiniteVolume v, FreeOperator f, std::vector<Measure> m)
    : volume(std::move(v)), free(std::move(f)), measures(std::move(m)) {
  if (measures.size() != volume.size()) {
    throw std::invalid_argument("Ensemble: need one measure per site");
  }
}

Ensemble::Ensemble(FiniteVolume v, FreeOperator f, const Measure& m)
    : Ensemble(v, std::move(f), std::vector<Measure>(v.size(), m)) {}

double Ensemble::q_lambda(double s) const {
  return anderson::q_lambda(measures, s);
}

}  // namespace anderson
