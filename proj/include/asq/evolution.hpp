#pragma once

#include "asq/multiplier.hpp"
#include "asq/source_term.hpp"
#include "asq/spectral_field.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace asq {

/// States at the M+1 nodes of a time grid.
struct Trajectory {
  TimeGrid grid;
  std::vector<SpectralField> states;

  Trajectory(TimeGrid g, std::vector<SpectralField> s);
  static Trajectory zeros(const TimeGrid& grid, const FourierLattice& lattice);

  const SpectralField& operator[](int m) const { return states[static_cast<std::size_t>(m)]; }
  SpectralField& operator[](int m) { return states[static_cast<std::size_t>(m)]; }
  const FourierLattice& lattice() const { return states.front().lattice(); }

  Trajectory& operator+=(const Trajectory& other);
  Trajectory& operator-=(const Trajectory& other);
  Trajectory& operator*=(double s);
  Trajectory& axpy(double s, const Trajectory& other);
  friend Trajectory operator-(Trajectory a, const Trajectory& b) { return a -= b; }
  friend Trajectory operator+(Trajectory a, const Trajectory& b) { return a += b; }
  friend Trajectory operator*(double s, Trajectory a) { return a *= s; }
};

/// Space-time L2 inner product: trapezoid in time, Parseval in space.
double space_time_inner(const Trajectory& a, const Trajectory& b);
/// max over nodes and grid points of |a - b| in physical space.
double sup_difference(const Trajectory& a, const Trajectory& b);

void require_same_grid(const Trajectory& a, const Trajectory& b, const char* where);

/// Per-mode weights of one exponential trapezoid step
///   u(t+dt) = E u(t) + a f(t) + b f(t+dt),
/// exact for sources linear in time over the step.
struct ExponentialWeights {
  std::vector<double> decay;   // E = exp(-lambda dt)
  std::vector<double> w_start; // a
  std::vector<double> w_end;   // b

  ExponentialWeights(const FourierLattice& lattice, double alpha, double dt);
};

/// Dissipation rate |2 pi k|^(2 alpha) of every half-layout entry.
std::vector<double> dissipation_rates(const FourierLattice& lattice, double alpha);

void require_alpha(double alpha);

/// d_t u + (-Delta)^alpha u = f, u(0) = 0.
Trajectory solve_fractional_diffusion(const SourceTerm& f, double alpha, const TimeGrid& grid);
/// Same, from precomputed node values of the source.
Trajectory solve_fractional_diffusion(const std::vector<SpectralField>& f_nodes, double alpha,
                                      const TimeGrid& grid);

/// -d_t v + (-Delta)^alpha v = g, v(T) = 0, computed as the time reversal of
/// the forward solve with source g(T - s).
Trajectory solve_dual(const SourceTerm& g, double alpha, const TimeGrid& grid);
Trajectory solve_dual(const std::vector<SpectralField>& g_nodes, double alpha,
                      const TimeGrid& grid);

struct ActiveScalarOptions {
  double cfl = 1.0;
};

/// Per-step diagnostics of the nonlinear solve.
struct StepStats {
  double max_speed = 0.0;
  double cfl_number = 0.0;
};

/// d_t theta + u.grad theta + (-Delta)^alpha theta = f, theta(0) = 0,
/// u = velocity(theta, spec). Exponential trapezoid predictor-corrector:
/// dissipation is integrated exactly, source and advection with the
/// exponential trapezoid weights.
Trajectory solve_active_scalar(const SourceTerm& f, const MultiplierSpec& spec, double alpha,
                               const TimeGrid& grid, const ActiveScalarOptions& options = {},
                               std::vector<StepStats>* stats = nullptr);

/// Writes t_%06d.bin snapshots and manifest.ini into `dir`.
void dump_trajectory(const std::filesystem::path& dir, const Trajectory& traj, double alpha,
                     const std::map<std::string, std::string>& extra = {});

} // namespace asq
