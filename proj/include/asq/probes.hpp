#pragma once

#include "asq/spectral_field.hpp"
#include "asq/window.hpp"

#include <array>

namespace asq {

/// Radial mollifier exp(-1/(1 - (|x - c|/width)^2)) sampled on the grid and
/// normalized to unit discrete mass.
SpectralField radial_bump(const FourierLattice& lattice, std::array<double, 2> center,
                          double width);

/// C-infinity cutoff: 1 for t <= 0, 0 for t >= 1.
double smooth_cutoff(double t);

/// Two unit-mass bumps with disjoint supports (phi1 in W1, phi2 in W2).
struct ProbePair {
  SpectralField phi1;
  SpectralField phi2;
  std::array<double, 2> center1;
  std::array<double, 2> center2;
  double width;
};

ProbePair make_probe_pair(const FourierLattice& lattice, std::array<double, 2> center1,
                          std::array<double, 2> center2, double width);

/// x_axis times a cutoff equal to 1 on the disk of radius `inner` around
/// `center` and 0 beyond `outer`. The support must stay within distance
/// `coordinate_radius` of the origin.
struct CoordinateProbe {
  SpectralField varphi;
  int axis;
  std::array<double, 2> center;
  double inner;
  double outer;
};

CoordinateProbe make_coordinate_probe(const FourierLattice& lattice, std::array<double, 2> center,
                                      double inner, double outer, int axis,
                                      double coordinate_radius = 0.35);

/// max over grid points where phi1 > 0 of |varphi - x_axis|.
double coordinate_probe_defect(const CoordinateProbe& probe, const SpectralField& phi1);

} // namespace asq
