#pragma once

#include "asq/spectral_field.hpp"

#include <functional>
#include <vector>

namespace asq {

/// Real samples on the N x N grid x = -1/2 + (i1, i2)/N, row-major with the
/// row index along x2.
struct PhysicalGrid {
  int n = 0;
  std::vector<double> values;

  PhysicalGrid() = default;
  explicit PhysicalGrid(int n_) : n(n_), values(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double& operator()(int i2, int i1) { return values[static_cast<std::size_t>(i2) * n + i1]; }
  double operator()(int i2, int i1) const {
    return values[static_cast<std::size_t>(i2) * n + i1];
  }

  /// Grid quadrature of the integral over the torus.
  double integral() const;
  double max_abs() const;
};

PhysicalGrid to_physical(const SpectralField& field);
/// Inverse of to_physical; output is projected onto Hermitian symmetry.
SpectralField to_spectral(const PhysicalGrid& grid, const FourierLattice& lattice);

/// Evaluates the field's trigonometric interpolant on a finer M x M grid
/// (M >= N, M even) by zero padding. Nyquist entries are split symmetrically.
PhysicalGrid to_physical_padded(const SpectralField& field, int m);

/// Samples a function of the physical point on the lattice's grid.
PhysicalGrid sample(int n, const std::function<double(double, double)>& fn);
SpectralField sample_spectral(const FourierLattice& lattice,
                              const std::function<double(double, double)>& fn);

/// Pointwise product of two fields on the N grid (aliased).
SpectralField multiply_pointwise(const SpectralField& field, const PhysicalGrid& weight);

} // namespace asq
