#pragma once

#include "asq/evolution.hpp"
#include "asq/window.hpp"

#include <vector>

namespace asq {

/// Discrete least-squares control problem
///   J(f) = 1/2 ||u_f chi_e - g||^2 + lambda/2 ||f||^2
/// over space-time L2 (trapezoid in time, grid quadrature in space), with
/// u_f the fractional diffusion response, chi_e the exterior mask of the
/// window and g a target on the exterior extended by zero. Admissible controls vanish outside the window plateau and at the
/// first and last time nodes.
class ControlProblem {
public:
  ControlProblem(Window window, double alpha, TimeGrid grid, FourierLattice lattice,
                 double lambda);

  const Window& window() const noexcept { return window_; }
  double alpha() const noexcept { return alpha_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const FourierLattice& lattice() const noexcept { return lattice_; }
  double lambda() const noexcept { return lambda_; }

  /// Restricts a space-time field to the admissible control set.
  Trajectory restrict_control(const Trajectory& f) const;
  /// Multiplies every node by chi_e.
  Trajectory exterior(const Trajectory& u) const;

  Trajectory forward(const Trajectory& f) const;
  double objective(const Trajectory& f, const Trajectory& g) const;
  /// Data misfit part 1/2 ||u_f chi_e - g||^2 from a precomputed u_f.
  double misfit(const Trajectory& u, const Trajectory& g) const;
  /// Gradient in the space-time inner product; lies in the control set.
  Trajectory gradient(const Trajectory& f, const Trajectory& g) const;
  /// Gradient from a precomputed forward response (avoids a solve).
  Trajectory gradient_from_response(const Trajectory& f, const Trajectory& u,
                                    const Trajectory& g) const;

private:
  Window window_;
  double alpha_;
  TimeGrid grid_;
  FourierLattice lattice_;
  double lambda_;
  PhysicalGrid plateau_;
  PhysicalGrid exterior_;
  std::vector<double> terminal_scale_;
};

double control_objective(const SourceTerm& f, const Trajectory& g, const Window& window,
                         double alpha, const TimeGrid& grid, double lambda);
SourceTerm control_gradient(const SourceTerm& f, const Trajectory& g, const Window& window,
                            double alpha, const TimeGrid& grid, double lambda);

struct CgIteration {
  int iteration;
  double objective;
  double data_misfit; // 1/2 ||u_f chi_e - g||^2
  double gradient_norm;
};

struct ControlResult {
  Trajectory f_opt;
  std::vector<CgIteration> history;
  double relative_residual = 0.0; // ||u_f chi_e - g|| / ||g||
  bool converged = false;
  bool maxiter_exhausted = false;

  SourceTerm source() const;
};

struct ControlOptions {
  int maxiter = 50;
  /// Stop once ||gradient|| <= gradient_tol * ||gradient at f = 0||.
  double gradient_tol = 1e-12;
  /// Stop once the relative residual drops below this value (0 disables).
  double residual_target = 0.0;
};

/// Conjugate gradients on the normal equations of the control problem,
/// started from f = 0. Rejects lambda <= 0.
ControlResult approximate_control(const Trajectory& g, const Window& window, double alpha,
                                  const TimeGrid& grid, double lambda,
                                  const ControlOptions& options = {});

} // namespace asq
