#include "asq/probes.hpp"

#include "asq/error.hpp"
#include "asq/fft.hpp"

#include <fmt/format.h>

#include <cmath>

namespace asq {

namespace {

PhysicalGrid bump_grid(int n, std::array<double, 2> center, double width) {
  auto g = sample(n, [&](double x1, double x2) {
    const double r = torus_distance({x1, x2}, center) / width;
    return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  });
  const double mass = g.integral();
  if (!(mass > 0.0)) throw Error("radial_bump: width below grid resolution");
  for (double& v : g.values) v /= mass;
  return g;
}

} // namespace

SpectralField radial_bump(const FourierLattice& lattice, std::array<double, 2> center,
                          double width) {
  if (!(width > 0.0 && width < 0.25)) throw Error("radial_bump: width must lie in (0, 1/4)");
  return to_spectral(bump_grid(lattice.n(), center, width), lattice);
}

double smooth_cutoff(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

ProbePair make_probe_pair(const FourierLattice& lattice, std::array<double, 2> center1,
                          std::array<double, 2> center2, double width) {
  if (torus_distance(center1, center2) < 2.0 * width) {
    throw Error(fmt::format("probe pair: supports of width {} around ({}, {}) and ({}, {}) overlap",
                            width, center1[0], center1[1], center2[0], center2[1]));
  }
  ProbePair p{radial_bump(lattice, center1, width), radial_bump(lattice, center2, width), center1,
              center2, width};
  return p;
}

CoordinateProbe make_coordinate_probe(const FourierLattice& lattice, std::array<double, 2> center,
                                      double inner, double outer, int axis,
                                      double coordinate_radius) {
  if (axis != 1 && axis != 2) throw Error("coordinate probe: axis must be 1 or 2");
  if (!(inner > 0.0 && outer > inner)) throw Error("coordinate probe: need 0 < inner < outer");
  if (std::hypot(center[0], center[1]) + outer > coordinate_radius) {
    throw Error(fmt::format("coordinate probe: support around ({}, {}) of radius {} leaves the "
                            "disk |x| <= {} (touches the cube boundary)",
                            center[0], center[1], outer, coordinate_radius));
  }
  auto g = sample(lattice.n(), [&](double x1, double x2) {
    const double d = std::hypot(x1 - center[0], x2 - center[1]);
    return (axis == 1 ? x1 : x2) * smooth_cutoff((d - inner) / (outer - inner));
  });
  return {to_spectral(g, lattice), axis, center, inner, outer};
}

double coordinate_probe_defect(const CoordinateProbe& probe, const SpectralField& phi1) {
  const auto v = to_physical(probe.varphi);
  const auto p = to_physical(phi1);
  const int n = v.n;
  double worst = 0.0;
  const double floor = 1e-12 * p.max_abs();
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      if (p(i2, i1) <= floor) continue;
      const double x = -0.5 + static_cast<double>(probe.axis == 1 ? i1 : i2) / n;
      worst = std::max(worst, std::abs(v(i2, i1) - x));
    }
  }
  return worst;
}

} // namespace asq
