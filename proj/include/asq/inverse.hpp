#pragma once

#include "asq/evolution.hpp"
#include "asq/probes.hpp"
#include "asq/window.hpp"

#include <array>
#include <optional>
#include <vector>

namespace asq {

/// Source-to-solution data: theta and u = R theta multiplied by the window
/// mask at every time node.
struct Measurement {
  Trajectory theta_w;
  Trajectory u1_w;
  Trajectory u2_w;
};

/// Throws when f is nonzero at a grid point outside the support of the
/// window mask (relative tolerance 1e-12) at any time node.
void require_supported_in(const SourceTerm& f, const Window& window, const TimeGrid& grid);

Measurement source_to_solution(const SourceTerm& f, const MultiplierSpec& spec,
                               const Window& window, double alpha, const TimeGrid& grid);

/// Sup-norm distance between two measurements over all nodes and grid points.
double measurement_distance(const Measurement& a, const Measurement& b);

struct MapsComparison {
  bool equal;
  double max_deviation;
};

MapsComparison maps_equal(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                          const std::vector<SourceTerm>& sources, const Window& window,
                          double alpha, const TimeGrid& grid, double tol);

/// Velocity-form pairing
///   int [phi2 (R1 - R2) phi1 . grad varphi + phi1 (R1 - R2) phi2 . grad varphi] dx,
/// with every product integrated exactly for the trigonometric interpolants
/// (Nyquist modes removed first).
double static_pairing(const Symbol& difference, const SpectralField& phi1,
                      const SpectralField& phi2, const SpectralField& varphi);
double static_pairing(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                      const SpectralField& phi1, const SpectralField& phi2,
                      const SpectralField& varphi);

/// The same quantity after moving the perpendicular gradient off the
/// multiplier:
///   -int [(K1 - K2) phi1 perp_grad phi2 . grad varphi
///         + (K1 - K2) phi2 perp_grad phi1 . grad varphi] dx.
double static_pairing_perp_form(const Symbol& difference, const SpectralField& phi1,
                                const SpectralField& phi2, const SpectralField& varphi);
double static_pairing_perp_form(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                                const SpectralField& phi1, const SpectralField& phi2,
                                const SpectralField& varphi);

/// int_0^T of the velocity-form pairing with (phi1, phi2) replaced by the
/// linear responses w1, w2 to f1, f2 (trapezoid in time).
double second_order_identity_residual(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                                      const SourceTerm& f1, const SourceTerm& f2,
                                      const SpectralField& varphi, const Window& window,
                                      double alpha, const TimeGrid& grid);

/// Alternative evaluation through v1 - v2, the difference of second
/// linearizations: <(v1 - v2)(T), varphi> + int_0^T <v1 - v2, (-Delta)^alpha varphi> dt.
double second_order_identity_via_v(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                                   const SourceTerm& f1, const SourceTerm& f2,
                                   const SpectralField& varphi, double alpha,
                                   const TimeGrid& grid);

/// int int d_j (K1 - K2)(x - y) phi2(y) phi1(x) dy dx through the pairing with
/// varphi equal to the complementary coordinate x_{3-j} on supp phi1.
double kernel_gradient_sample(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                              const ProbePair& probe, int j, const CoordinateProbe& coordinate);

/// Fourier-sum value of the same mollified quantity with the bumps sampled on
/// the 2N grid: sum_k 2 pi i k_j (m1 - m2)(k) conj(phi1^(k)) phi2^(k).
double kernel_gradient_truth(const Symbol& difference, int n, std::array<double, 2> center1,
                             std::array<double, 2> center2, double width, int j);
/// Point value d_j (K1 - K2)(offset) from the Fourier sum on the 2N lattice.
double kernel_gradient_point(const Symbol& difference, int n, std::array<double, 2> offset, int j);

/// Geometry constraints for realizing offsets x - y with x in W1, y in W2.
struct ProbeGeometry {
  Window observation{{0.0, 0.0}, 0.1};
  /// Support of the coordinate probe stays within this distance of the origin.
  double coordinate_radius = 0.35;
  /// Outer radius of the coordinate cutoff in units of the bump width.
  double cutoff_ratio = 1.5;
};

struct Placement {
  std::array<double, 2> center1;
  std::array<double, 2> center2;
};

/// Grid-aligned center1 (and center2 = center1 - offset) satisfying the
/// geometry; nullopt when the offset is not realizable.
std::optional<Placement> place_offset(std::array<double, 2> offset, double width, int n,
                                      const ProbeGeometry& geometry);

struct ReconstructionRow {
  std::array<double, 2> offset;
  int axis;
  double sampled;
  double truth;
  double point;
  double abs_error;
};

struct ReconstructionTable {
  std::vector<ReconstructionRow> rows;
  /// ||sampled - truth|| / ||truth|| over all rows (absolute when truth is 0).
  double relative_l2_error = 0.0;
  /// ||truth - point|| / ||point||: mollification error of the bumps.
  double mollification_error = 0.0;
  /// ||sampled - point|| / ||point||.
  double sampled_vs_point_error = 0.0;
};

ReconstructionTable reconstruct_kernel_gradient(const MultiplierSpec& spec1,
                                                const MultiplierSpec& spec2,
                                                const std::vector<std::array<double, 2>>& offsets,
                                                double width, const FourierLattice& lattice,
                                                const ProbeGeometry& geometry = {},
                                                int threads = 1);

/// radii x angles polar grid of offsets.
std::vector<std::array<double, 2>> polar_offsets(double r_min, double r_max, int radii, int angles);

/// max over test fields g and grid points in the exterior of the window of
/// |(R1 - R2) g|.
double exterior_velocity_gap(const MultiplierSpec& spec1, const MultiplierSpec& spec2,
                             const std::vector<SpectralField>& tests, const Window& window);

} // namespace asq
