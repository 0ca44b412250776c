#pragma once

#include "asq/fft.hpp"
#include "asq/multiplier.hpp"
#include "asq/spectral_field.hpp"

#include <array>

namespace asq {

/// (-Delta)^r with symbol |2 pi k|^(2r), r >= 0. The mean is kept for r = 0
/// and removed for r > 0.
SpectralField fractional_laplacian(const SpectralField& field, double r);

enum class SobolevKind { inhomogeneous, homogeneous };

/// (sum_k (1+|k|^2)^r |c(k)|^2)^(1/2) or (sum_{k != 0} |k|^(2r) |c(k)|^2)^(1/2),
/// accumulated from the largest |k| down.
double sobolev_norm(const SpectralField& field, double r,
                    SobolevKind kind = SobolevKind::inhomogeneous);

/// K theta: multiplies by the symbol and zeroes the mean.
SpectralField apply_multiplier(const SpectralField& field, const MultiplierSpec& spec);
SpectralField apply_symbol(const SpectralField& field, const Symbol& symbol);

/// Spectral derivative d/dx_axis (axis 1 or 2); the unpaired Nyquist mode is
/// zeroed along that axis.
SpectralField derivative(const SpectralField& field, int axis);
VectorField gradient(const SpectralField& field);
/// Perpendicular gradient (-d2, d1).
VectorField perp_gradient(const SpectralField& field);

/// u = (-d2 K theta, d1 K theta); divergence-free mode by mode.
VectorField velocity(const SpectralField& field, const MultiplierSpec& spec);
VectorField velocity(const SpectralField& field, const Symbol& symbol);

/// max_k |2 pi k . u(k)| over the full lattice.
double spectral_divergence(const VectorField& u);

/// Zeroes modes with max(|k1|, |k2|) > N/3.
SpectralField dealias(SpectralField field);

/// Dealiased pseudospectral product (R a) . grad b where R a = velocity(a).
/// The output mean is set to zero (the product is a divergence). When
/// `max_speed` is given it receives max |R a| over the grid.
SpectralField transport(const SpectralField& a, const SpectralField& b, const Symbol& symbol,
                        double* max_speed = nullptr);

/// u . grad theta with u = velocity(theta, spec).
SpectralField advection_term(const SpectralField& theta, const MultiplierSpec& spec);

/// Truncated lattice sum Re sum_{k != 0} m(k) exp(2 pi i x.k) over the N x N
/// lattice. Rejects x = 0 (mod 1).
double kernel_physical(const Symbol& symbol, int n, std::array<double, 2> x);
double kernel_physical(const MultiplierSpec& spec, int n, std::array<double, 2> x);

/// Integral over the torus of a*b*c, exact for the trigonometric interpolants
/// (evaluated on a 2N grid). Inputs with nonzero Nyquist entries are
/// interpreted with the symmetric split used by to_physical_padded.
double triple_integral(const SpectralField& a, const SpectralField& b, const SpectralField& c);

/// Removes the unpaired Nyquist row and column.
SpectralField strip_nyquist(SpectralField field);

} // namespace asq
