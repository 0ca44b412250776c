#include "asq/evolution.hpp"

#include "asq/error.hpp"
#include "asq/fft.hpp"
#include "asq/snapshot.hpp"
#include "asq/spectral_ops.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>

namespace asq {

Trajectory::Trajectory(TimeGrid g, std::vector<SpectralField> s)
    : grid(std::move(g)), states(std::move(s)) {
  if (states.size() != static_cast<std::size_t>(grid.steps()) + 1) {
    throw Error("Trajectory: need M+1 states");
  }
}

Trajectory Trajectory::zeros(const TimeGrid& grid, const FourierLattice& lattice) {
  return Trajectory(grid, std::vector<SpectralField>(static_cast<std::size_t>(grid.steps()) + 1,
                                                     SpectralField(lattice)));
}

Trajectory& Trajectory::operator+=(const Trajectory& other) { return axpy(1.0, other); }

Trajectory& Trajectory::operator-=(const Trajectory& other) { return axpy(-1.0, other); }

Trajectory& Trajectory::operator*=(double s) {
  for (auto& st : states) st *= s;
  return *this;
}

Trajectory& Trajectory::axpy(double s, const Trajectory& other) {
  require_same_grid(*this, other, "Trajectory::axpy");
  for (std::size_t m = 0; m < states.size(); ++m) states[m].axpy(s, other.states[m]);
  return *this;
}

void require_same_grid(const Trajectory& a, const Trajectory& b, const char* where) {
  if (!(a.grid == b.grid)) throw Error(std::string(where) + ": time grid mismatch");
  require_same_lattice(a.states.front(), b.states.front(), where);
}

double space_time_inner(const Trajectory& a, const Trajectory& b) {
  require_same_grid(a, b, "space_time_inner");
  double sum = 0.0;
  for (int m = 0; m <= a.grid.steps(); ++m) sum += a.grid.weight(m) * inner(a[m], b[m]);
  return sum;
}

double sup_difference(const Trajectory& a, const Trajectory& b) {
  require_same_grid(a, b, "sup_difference");
  double d = 0.0;
  for (int m = 0; m <= a.grid.steps(); ++m) d = std::max(d, to_physical(a[m] - b[m]).max_abs());
  return d;
}

void require_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw Error(fmt::format("dissipation exponent alpha must lie in (1/2, 1), got {}", alpha));
  }
}

std::vector<double> dissipation_rates(const FourierLattice& lattice, double alpha) {
  std::vector<double> rates(lattice.spectral_size());
  for (int i2 = 0; i2 < lattice.n(); ++i2) {
    for (int i1 = 0; i1 < lattice.half(); ++i1) {
      const double k = lattice.kmag(i2, i1);
      rates[lattice.index(i2, i1)] =
          k == 0.0 ? 0.0 : std::pow(2.0 * std::numbers::pi * k, 2.0 * alpha);
    }
  }
  return rates;
}

ExponentialWeights::ExponentialWeights(const FourierLattice& lattice, double alpha, double dt) {
  const auto rates = dissipation_rates(lattice, alpha);
  decay.resize(rates.size());
  w_start.resize(rates.size());
  w_end.resize(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double z = rates[i] * dt;
    const double e = std::exp(-z);
    decay[i] = e;
    if (z < 1e-2) {
      // series of (1 - e - z e)/z^2 and (e - 1 + z)/z^2
      w_start[i] = dt * (0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0 + z * z * z * z / 144.0);
      w_end[i] = dt * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0 + z * z * z * z / 720.0);
    } else {
      w_start[i] = dt * (1.0 - e - z * e) / (z * z);
      w_end[i] = dt * (e - 1.0 + z) / (z * z);
    }
  }
}

namespace {

// u <- E u + a f0 + b f1, mode by mode.
void exponential_step(SpectralField& u, const SpectralField& f0, const SpectralField& f1,
                      const ExponentialWeights& w) {
  auto cu = u.coeffs();
  const auto c0 = f0.coeffs();
  const auto c1 = f1.coeffs();
  for (std::size_t i = 0; i < cu.size(); ++i) {
    cu[i] = w.decay[i] * cu[i] + w.w_start[i] * c0[i] + w.w_end[i] * c1[i];
  }
}

bool finite(const SpectralField& f) {
  for (const auto& c : f.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

} // namespace

Trajectory solve_fractional_diffusion(const std::vector<SpectralField>& f_nodes, double alpha,
                                      const TimeGrid& grid) {
  require_alpha(alpha);
  if (f_nodes.size() != static_cast<std::size_t>(grid.steps()) + 1) {
    throw Error("solve_fractional_diffusion: need M+1 source nodes");
  }
  const auto& lattice = f_nodes.front().lattice();
  const ExponentialWeights w(lattice, alpha, grid.dt());
  std::vector<SpectralField> states;
  states.reserve(f_nodes.size());
  states.emplace_back(lattice);
  for (int m = 0; m < grid.steps(); ++m) {
    SpectralField next = states.back();
    exponential_step(next, f_nodes[m], f_nodes[m + 1], w);
    states.push_back(std::move(next));
  }
  return Trajectory(grid, std::move(states));
}

Trajectory solve_fractional_diffusion(const SourceTerm& f, double alpha, const TimeGrid& grid) {
  require_alpha(alpha);
  return solve_fractional_diffusion(f.nodes(grid), alpha, grid);
}

Trajectory solve_dual(const std::vector<SpectralField>& g_nodes, double alpha,
                      const TimeGrid& grid) {
  std::vector<SpectralField> reversed(g_nodes.rbegin(), g_nodes.rend());
  auto forward = solve_fractional_diffusion(reversed, alpha, grid);
  std::reverse(forward.states.begin(), forward.states.end());
  return forward;
}

Trajectory solve_dual(const SourceTerm& g, double alpha, const TimeGrid& grid) {
  require_alpha(alpha);
  return solve_dual(g.nodes(grid), alpha, grid);
}

Trajectory solve_active_scalar(const SourceTerm& f, const MultiplierSpec& spec, double alpha,
                               const TimeGrid& grid, const ActiveScalarOptions& options,
                               std::vector<StepStats>* stats) {
  require_alpha(alpha);
  const auto& lattice = f.lattice();
  if (!spec.compatible(lattice)) throw Error("solve_active_scalar: multiplier/lattice mismatch");
  const ExponentialWeights w(lattice, alpha, grid.dt());
  const double dt = grid.dt();
  const double n = lattice.n();

  std::vector<SpectralField> states;
  states.reserve(static_cast<std::size_t>(grid.steps()) + 1);
  states.emplace_back(lattice);
  SpectralField f_now = f(grid.node(0));
  if (stats) stats->clear();

  for (int m = 0; m < grid.steps(); ++m) {
    const SpectralField& theta = states.back();
    SpectralField f_next = f(grid.node(m + 1));

    double speed = 0.0;
    const auto adv = transport(theta, theta, spec.symbol(), &speed);
    const double cfl = speed * dt * n;
    if (stats) stats->push_back({speed, cfl});
    if (!std::isfinite(cfl)) {
      throw SolverError(SolverError::Kind::blowup, m, fmt::format("non-finite velocity at step {}", m));
    }
    if (cfl > options.cfl) {
      throw SolverError(SolverError::Kind::cfl, m,
                        fmt::format("CFL violated at step {}: max|u| dt N = {:.4g} > {}", m, cfl,
                                    options.cfl));
    }

    SpectralField rhs_now = f_now - adv;
    // predictor: advection frozen over the step
    SpectralField predicted = theta;
    exponential_step(predicted, rhs_now, f_next - adv, w);
    const auto adv_predicted = transport(predicted, predicted, spec.symbol());

    SpectralField next = theta;
    exponential_step(next, rhs_now, f_next - adv_predicted, w);
    if (!finite(next)) {
      throw SolverError(SolverError::Kind::blowup, m,
                        fmt::format("non-finite state after step {}", m));
    }
    states.push_back(std::move(next));
    f_now = std::move(f_next);
  }
  return Trajectory(grid, std::move(states));
}

void dump_trajectory(const std::filesystem::path& dir, const Trajectory& traj, double alpha,
                     const std::map<std::string, std::string>& extra) {
  std::filesystem::create_directories(dir);
  for (int m = 0; m <= traj.grid.steps(); ++m) {
    write_snapshot(dir / fmt::format("t_{:06d}.bin", m), traj[m]);
  }
  std::ofstream os(dir / "manifest.ini");
  os << "[trajectory]\n";
  os << fmt::format("T = {}\nM = {}\nalpha = {}\nN = {}\n", traj.grid.final_time(),
                    traj.grid.steps(), alpha, traj.lattice().n());
  if (!extra.empty()) {
    os << "\n[spec]\n";
    for (const auto& [k, v] : extra) os << k << " = " << v << "\n";
  }
}

} // namespace asq
