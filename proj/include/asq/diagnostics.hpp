#pragma once

#include "asq/evolution.hpp"

#include <vector>

namespace asq {

/// L^q norm by grid quadrature on a 2x oversampled grid.
double lq_norm(const SpectralField& field, double q);

struct LqBoundRow {
  double t;
  double lhs; // ||theta(t)||_q
  double rhs; // Q_t(f) = int_0^t ||f||_q
  bool pass;
};

struct LqBoundReport {
  std::vector<LqBoundRow> rows;
  /// True when the mean was removed from f and theta before checking.
  bool mean_reduced = false;
  bool pass() const;
};

/// Checks ||theta(t)||_q <= int_0^t ||f(tau)||_q dtau at every node. Sources
/// with nonzero spatial mean are reduced to f - mean(f) and
/// theta - int_0^t mean(f). Requires 0 < 1/q < alpha - 1/2.
LqBoundReport lq_bound_check(const Trajectory& traj, const SourceTerm& f, double q, double alpha);

void require_lq_exponent(double q, double alpha);
/// The same comparison for any q >= 1, without the exponent hypothesis.
LqBoundReport lq_bound_diagnostic(const Trajectory& traj, const SourceTerm& f, double q);

/// ||theta(t_m)||_{L^2} for every node.
std::vector<double> l2_history(const Trajectory& traj);

/// True when the L2 norm strictly decreases across all nodes with t > t_after.
bool strictly_decreasing_after(const Trajectory& traj, double t_after);

} // namespace asq
