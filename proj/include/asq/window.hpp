#pragma once

#include "asq/fft.hpp"

#include <array>

namespace asq {

/// C^3 step: 1 for t <= 0, 0 for t >= 1, septic Hermite blend in between.
double smooth_step_down(double t);

/// Observation window W: a disk on the torus with a smooth cutoff (1 inside
/// radius/2, 0 outside radius) and an exterior mask for T^2 minus the closure
/// of W (0 inside radius, 1 outside 1.5 radius). The two masks have disjoint
/// supports.
class Window {
public:
  Window(std::array<double, 2> center, double radius);

  std::array<double, 2> center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

  double mask_at(double x1, double x2) const;
  double exterior_at(double x1, double x2) const;
  /// 1 where the mask is exactly 1 (the plateau), else 0.
  double plateau_at(double x1, double x2) const;

  PhysicalGrid mask(int n) const;
  PhysicalGrid exterior_mask(int n) const;
  PhysicalGrid plateau(int n) const;
  /// 1 where the mask is positive.
  PhysicalGrid support(int n) const;

  /// Disk of radius r around c lies inside the plateau.
  bool contains_disk(std::array<double, 2> c, double r) const;
  /// Disk of radius r around c misses the closure of W.
  bool avoids_disk(std::array<double, 2> c, double r) const;

private:
  std::array<double, 2> center_;
  double radius_;
};

/// Largest coefficient magnitude on the outermost lattice shell (max |k|).
double spectral_tail(const SpectralField& field);

} // namespace asq
