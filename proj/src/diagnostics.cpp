#include "asq/diagnostics.hpp"

#include "asq/error.hpp"
#include "asq/fft.hpp"

#include <fmt/format.h>

#include <cmath>

namespace asq {

double lq_norm(const SpectralField& field, double q) {
  if (!(q >= 1.0)) throw Error("lq_norm: q must be >= 1");
  const auto g = to_physical_padded(field, 2 * field.n());
  double sum = 0.0;
  for (double v : g.values) sum += std::pow(std::abs(v), q);
  return std::pow(sum / static_cast<double>(g.values.size()), 1.0 / q);
}

bool LqBoundReport::pass() const {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

void require_lq_exponent(double q, double alpha) {
  if (!(q > 0.0) || !(1.0 / q < alpha - 0.5)) {
    throw Error(fmt::format("q={} violates 0 < 1/q < alpha - 1/2 for alpha={}", q, alpha));
  }
}

LqBoundReport lq_bound_check(const Trajectory& traj, const SourceTerm& f, double q,
                             double alpha) {
  require_lq_exponent(q, alpha);
  return lq_bound_diagnostic(traj, f, q);
}

LqBoundReport lq_bound_diagnostic(const Trajectory& traj, const SourceTerm& f, double q) {
  const auto& grid = traj.grid;
  auto f_nodes = f.nodes(grid);
  LqBoundReport report;
  for (const auto& fn : f_nodes) {
    if (std::abs(fn.mean()) > 0.0) report.mean_reduced = true;
  }

  double accumulated_mean = 0.0;
  double q_t = 0.0;
  double prev_fq = 0.0;
  for (int m = 0; m <= grid.steps(); ++m) {
    const double mean_f = f_nodes[m].mean().real();
    if (m > 0) accumulated_mean += 0.5 * grid.dt() * (f_nodes[m - 1].mean().real() + mean_f);
    SpectralField f_red = f_nodes[m];
    SpectralField theta_red = traj[m];
    if (report.mean_reduced) {
      f_red.at(0, 0) = 0.0;
      theta_red.at(0, 0) -= accumulated_mean;
    }
    const double fq = lq_norm(f_red, q);
    if (m > 0) q_t += 0.5 * grid.dt() * (prev_fq + fq);
    prev_fq = fq;
    const double lhs = lq_norm(theta_red, q);
    const bool ok = lhs <= q_t * (1.0 + 1e-12) + 1e-14;
    report.rows.push_back({grid.node(m), lhs, q_t, ok});
  }
  return report;
}

std::vector<double> l2_history(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back(std::sqrt(s.energy()));
  return out;
}

bool strictly_decreasing_after(const Trajectory& traj, double t_after) {
  const auto h = l2_history(traj);
  bool any = false;
  for (int m = 1; m <= traj.grid.steps(); ++m) {
    if (traj.grid.node(m - 1) < t_after) continue;
    any = true;
    if (!(h[m] < h[m - 1])) return false;
  }
  return any;
}

} // namespace asq
