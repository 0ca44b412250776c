#include "asq/inverse.hpp"

#include "asq/error.hpp"
#include "asq/fft.hpp"
#include "asq/linearization.hpp"
#include "asq/parallel.hpp"
#include "asq/spectral_ops.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace asq {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Trajectory masked_trajectory(const Trajectory& t, const PhysicalGrid& mask) {
  Trajectory out = t;
  for (auto& s : out.states) s = multiply_pointwise(s, mask);
  return out;
}

// Fields evaluated on the 2N grid; sums of triple products there are exact
// integrals of the interpolants.
struct Padded {
  explicit Padded(const SpectralField& f) : grid(to_physical_padded(f, 2 * f.n())) {}
  PhysicalGrid grid;
};

double integrate3(const Padded& a, const Padded& b, const Padded& c) {
  double sum = 0.0;
  const auto& va = a.grid.values;
  const auto& vb = b.grid.values;
  const auto& vc = c.grid.values;
  for (std::size_t i = 0; i < va.size(); ++i) sum += va[i] * vb[i] * vc[i];
  return sum / static_cast<double>(va.size());
}

} // namespace

void require_supported_in(const SourceTerm& f, const Window& window, const TimeGrid& grid) {
  const auto support = window.support(f.lattice().n());
  for (int m = 0; m <= grid.steps(); ++m) {
    const auto g = to_physical(f(grid.node(m)));
    const double scale = std::max(1.0, g.max_abs());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      if (support.values[i] == 0.0 && std::abs(g.values[i]) > 1e-12 * scale) {
        throw Error(fmt::format("source not supported in the window: |f| = {:.3g} outside W at "
                                "t = {}",
                                std::abs(g.values[i]), grid.node(m)));
      }
    }
  }
}

Measurement source_to_solution(const SourceTerm& f, const MultiplierSpec& spec,
                               const Window& window, double alpha, const TimeGrid& grid) {
  require_supported_in(f, window, grid);
  const auto theta = solve_active_scalar(f, spec, alpha, grid);
  const auto mask = window.mask(f.lattice().n());
  std::vector<SpectralField> u1, u2;
  u1.reserve(theta.states.size());
  u2.reserve(theta.states.size());
  for (const auto& s : theta.states) {
    auto u = velocity(s, spec);
    u1.push_back(multiply_pointwise(u.u1, mask));
    u2.push_back(multiply_pointwise(u.u2, mask));
  }
  return {masked_trajectory(theta, mask), Trajectory(grid, std::move(u1)),
          Trajectory(grid, std::move(u2))};
}

double measurement_distance(const Measurement& a, const Measurement& b) {
  return std::max({sup_difference(a.theta_w, b.theta_w), sup_difference(a.u1_w, b.u1_w),
                   sup_difference(a.u2_w, b.u2_w)});
}

MapsComparison maps_equal(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                          const std::vector<SourceTerm>& sources, const Window& window,
                          double alpha, const TimeGrid& grid, double tol) {
  double worst = 0.0;
  for (const auto& f : sources) {
    const auto m1 = source_to_solution(f, spec1, window, alpha, grid);
    const auto m2 = source_to_solution(f, spec2, window, alpha, grid);
    worst = std::max(worst, measurement_distance(m1, m2));
  }
  return {worst <= tol, worst};
}

double static_pairing(const Symbol& difference, const SpectralField& phi1,
                      const SpectralField& phi2, const SpectralField& varphi) {
  const auto p1 = strip_nyquist(phi1);
  const auto p2 = strip_nyquist(phi2);
  const auto vp = strip_nyquist(varphi);
  const auto v1 = velocity(p1, difference);
  const auto v2 = velocity(p2, difference);
  const auto g = gradient(vp);
  const Padded a1(p1), a2(p2), g1(g.u1), g2(g.u2);
  const Padded v11(v1.u1), v12(v1.u2), v21(v2.u1), v22(v2.u2);
  return integrate3(a2, v11, g1) + integrate3(a2, v12, g2) + integrate3(a1, v21, g1) +
         integrate3(a1, v22, g2);
}

double static_pairing(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                      const SpectralField& phi1, const SpectralField& phi2,
                      const SpectralField& varphi) {
  return static_pairing(difference(spec1, spec2), phi1, phi2, varphi);
}

double static_pairing_perp_form(const Symbol& difference, const SpectralField& phi1,
                                const SpectralField& phi2, const SpectralField& varphi) {
  const auto p1 = strip_nyquist(phi1);
  const auto p2 = strip_nyquist(phi2);
  const auto vp = strip_nyquist(varphi);
  const Padded k1(apply_symbol(p1, difference)), k2(apply_symbol(p2, difference));
  const auto q1 = perp_gradient(p1);
  const auto q2 = perp_gradient(p2);
  const auto g = gradient(vp);
  const Padded q11(q1.u1), q12(q1.u2), q21(q2.u1), q22(q2.u2), g1(g.u1), g2(g.u2);
  return -(integrate3(k1, q21, g1) + integrate3(k1, q22, g2) + integrate3(k2, q11, g1) +
           integrate3(k2, q12, g2));
}

double static_pairing_perp_form(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                                const SpectralField& phi1, const SpectralField& phi2,
                                const SpectralField& varphi) {
  return static_pairing_perp_form(difference(spec1, spec2), phi1, phi2, varphi);
}

double second_order_identity_residual(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                                      const SourceTerm& f1, const SourceTerm& f2,
                                      const SpectralField& varphi, const Window& window,
                                      double alpha, const TimeGrid& grid) {
  require_supported_in(f1, window, grid);
  require_supported_in(f2, window, grid);
  const auto interior = window.support(varphi.n());
  const auto vp = to_physical(varphi);
  for (std::size_t i = 0; i < vp.values.size(); ++i) {
    if (interior.values[i] != 0.0 && std::abs(vp.values[i]) > 1e-12 * std::max(1.0, vp.max_abs())) {
      throw Error("second_order_identity_residual: test function not supported in the exterior");
    }
  }
  const auto w1 = solve_fractional_diffusion(f1, alpha, grid);
  const auto w2 = solve_fractional_diffusion(f2, alpha, grid);
  const auto diff = difference(spec1, spec2);
  double sum = 0.0;
  for (int m = 0; m <= grid.steps(); ++m) {
    if (w1[m].max_abs() == 0.0 && w2[m].max_abs() == 0.0) continue;
    sum += grid.weight(m) * static_pairing(diff, w1[m], w2[m], varphi);
  }
  return sum;
}

double second_order_identity_via_v(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                                   const SourceTerm& f1, const SourceTerm& f2,
                                   const SpectralField& varphi, double alpha,
                                   const TimeGrid& grid) {
  const auto w1 = solve_fractional_diffusion(f1, alpha, grid);
  const auto w2 = solve_fractional_diffusion(f2, alpha, grid);
  const auto v = solve_second_linearization(w1, w2, difference(spec1, spec2), alpha);
  const auto lap = fractional_laplacian(varphi, alpha);
  double sum = inner(v[grid.steps()], varphi);
  for (int m = 0; m <= grid.steps(); ++m) sum += grid.weight(m) * inner(v[m], lap);
  return sum;
}

double kernel_gradient_sample(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                              const ProbePair& probe, int j, const CoordinateProbe& coordinate) {
  if (j != 1 && j != 2) throw Error("kernel_gradient_sample: j must be 1 or 2");
  if (coordinate.axis != 3 - j) {
    throw Error(fmt::format("kernel_gradient_sample: d_{} needs the coordinate probe x_{}", j, 3 - j));
  }
  if (torus_distance(coordinate.center, probe.center1) + probe.width > coordinate.inner + 1e-12) {
    throw Error("kernel_gradient_sample: coordinate probe plateau does not cover supp phi1");
  }
  if (torus_distance(coordinate.center, probe.center2) < coordinate.outer + probe.width) {
    throw Error("kernel_gradient_sample: coordinate probe overlaps supp phi2");
  }
  const double s = static_pairing(spec1, spec2, probe.phi1, probe.phi2, coordinate.varphi);
  // varphi = x2 isolates int (K phi2) d1 phi1 with a minus sign; varphi = x1
  // gives + int (K phi2) d2 phi1.
  return j == 1 ? s : -s;
}

double kernel_gradient_truth(const Symbol& difference, int n, std::array<double, 2> center1,
                             std::array<double, 2> center2, double width, int j) {
  const FourierLattice fine(2 * n);
  const auto p1 = radial_bump(fine, center1, width);
  const auto p2 = radial_bump(fine, center2, width);
  double sum = 0.0;
  for (int i2 = 0; i2 < fine.n(); ++i2) {
    for (int i1 = 0; i1 < fine.half(); ++i1) {
      if (fine.nyquist1(i1) || fine.nyquist2(i2)) continue;
      const int k1 = fine.k1(i1);
      const int k2 = fine.k2(i2);
      const double m = difference(k1, k2);
      if (m == 0.0) continue;
      const Complex deriv(0.0, two_pi * (j == 1 ? k1 : k2));
      const Complex term = deriv * m * std::conj(p1.at(i2, i1)) * p2.at(i2, i1);
      sum += fine.multiplicity(i1) * term.real();
    }
  }
  return sum;
}

double kernel_gradient_point(const Symbol& difference, int n, std::array<double, 2> offset, int j) {
  const int fine = 2 * n;
  double sum = 0.0;
  for (int k2 = -fine / 2 + 1; k2 < fine / 2; ++k2) {
    for (int k1 = -fine / 2 + 1; k1 < fine / 2; ++k1) {
      const double m = difference(k1, k2);
      if (m == 0.0) continue;
      const double kj = j == 1 ? k1 : k2;
      sum -= two_pi * kj * m * std::sin(two_pi * (k1 * offset[0] + k2 * offset[1]));
    }
  }
  return sum;
}

std::optional<Placement> place_offset(std::array<double, 2> offset, double width, int n,
                                      const ProbeGeometry& geometry) {
  const double outer = geometry.cutoff_ratio * width;
  const auto& w = geometry.observation;
  if (std::hypot(offset[0], offset[1]) < outer + width) return std::nullopt;
  std::optional<Placement> best;
  double best_score = 0.0;
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      const std::array<double, 2> c1{-0.5 + double(i1) / n, -0.5 + double(i2) / n};
      if (std::hypot(c1[0], c1[1]) + outer > geometry.coordinate_radius) continue;
      if (!w.avoids_disk(c1, outer)) continue;
      std::array<double, 2> c2{c1[0] - offset[0], c1[1] - offset[1]};
      for (double& c : c2) c -= std::floor(c + 0.5);
      if (!w.avoids_disk(c2, width)) continue;
      if (torus_distance(c1, c2) < outer + width) continue;
      // prefer the placement with the most clearance from W
      const double score = std::min(torus_distance(c1, w.center()) - outer,
                                    torus_distance(c2, w.center()) - width);
      if (!best || score > best_score + 1e-15) {
        best = Placement{c1, c2};
        best_score = score;
      }
    }
  }
  return best;
}

ReconstructionTable reconstruct_kernel_gradient(const MultiplierSpec& spec1,
                                                const MultiplierSpec& spec2,
                                                const std::vector<std::array<double, 2>>& offsets,
                                                double width, const FourierLattice& lattice,
                                                const ProbeGeometry& geometry, int threads) {
  std::vector<Placement> placements;
  for (const auto& o : offsets) {
    auto p = place_offset(o, width, lattice.n(), geometry);
    if (!p) {
      throw Error(fmt::format("offset ({:.4f}, {:.4f}) is not realizable with width {} outside W",
                              o[0], o[1], width));
    }
    placements.push_back(*p);
  }
  const auto diff = difference(spec1, spec2);
  std::vector<std::array<ReconstructionRow, 2>> rows(offsets.size());
  parallel_for(offsets.size(), threads, [&](std::size_t i) {
    const auto& pl = placements[i];
    const auto probe = make_probe_pair(lattice, pl.center1, pl.center2, width);
    for (int j = 1; j <= 2; ++j) {
      const auto coord = make_coordinate_probe(lattice, pl.center1, width,
                                               geometry.cutoff_ratio * width, 3 - j,
                                               geometry.coordinate_radius);
      const double sampled = kernel_gradient_sample(spec1, spec2, probe, j, coord);
      const double truth =
          kernel_gradient_truth(diff, lattice.n(), pl.center1, pl.center2, width, j);
      const double point = kernel_gradient_point(diff, lattice.n(), offsets[i], j);
      rows[i][j - 1] = {offsets[i], j, sampled, truth, point, std::abs(sampled - truth)};
    }
  });
  ReconstructionTable table;
  double num = 0.0, den = 0.0, moll = 0.0, sp = 0.0, pden = 0.0;
  for (const auto& pair : rows) {
    for (const auto& r : pair) {
      table.rows.push_back(r);
      num += r.abs_error * r.abs_error;
      den += r.truth * r.truth;
      moll += (r.truth - r.point) * (r.truth - r.point);
      sp += (r.sampled - r.point) * (r.sampled - r.point);
      pden += r.point * r.point;
    }
  }
  table.relative_l2_error = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  table.mollification_error = pden > 0.0 ? std::sqrt(moll / pden) : std::sqrt(moll);
  table.sampled_vs_point_error = pden > 0.0 ? std::sqrt(sp / pden) : std::sqrt(sp);
  return table;
}

std::vector<std::array<double, 2>> polar_offsets(double r_min, double r_max, int radii,
                                                 int angles) {
  std::vector<std::array<double, 2>> out;
  for (int a = 0; a < angles; ++a) {
    const double phi = two_pi * a / angles;
    for (int r = 0; r < radii; ++r) {
      const double rho = radii == 1 ? r_min : r_min + (r_max - r_min) * r / (radii - 1);
      out.push_back({rho * std::cos(phi), rho * std::sin(phi)});
    }
  }
  return out;
}

double exterior_velocity_gap(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                             const std::vector<SpectralField>& tests, const Window& window) {
  double worst = 0.0;
  const auto diff = difference(spec1, spec2);
  for (const auto& g : tests) {
    const auto ext = window.exterior_mask(g.n());
    const auto u = velocity(g, diff);
    const auto a = to_physical(u.u1);
    const auto b = to_physical(u.u2);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (ext.values[i] > 0.0) worst = std::max({worst, std::abs(a.values[i]), std::abs(b.values[i])});
    }
  }
  return worst;
}

} // namespace asq
