#include "asq/runge.hpp"

#include "asq/error.hpp"
#include "asq/fft.hpp"

#include <cmath>

namespace asq {

namespace {

SpectralField masked(const SpectralField& f, const PhysicalGrid& mask) {
  return multiply_pointwise(f, mask);
}

double masked_residual_energy(const SpectralField& u, const SpectralField& g,
                              const PhysicalGrid& mask) {
  const auto pu = to_physical(u);
  const auto pg = to_physical(g);
  double sum = 0.0;
  for (std::size_t i = 0; i < pu.values.size(); ++i) {
    const double v = pu.values[i] * mask.values[i] - pg.values[i];
    sum += v * v;
  }
  return sum / static_cast<double>(pu.values.size());
}

} // namespace

ControlProblem::ControlProblem(Window window, double alpha, TimeGrid grid, FourierLattice lattice,
                               double lambda)
    : window_(std::move(window)),
      alpha_(alpha),
      grid_(std::move(grid)),
      lattice_(std::move(lattice)),
      lambda_(lambda),
      plateau_(window_.plateau(lattice_.n())),
      exterior_(window_.exterior_mask(lattice_.n())) {
  require_alpha(alpha);
  if (!(lambda >= 0.0)) throw Error("ControlProblem: lambda must be >= 0");
  // Per-mode scale (a + b E) / (2 a) of the terminal residual node.
  const ExponentialWeights w(lattice_, alpha, grid_.dt());
  terminal_scale_.resize(w.decay.size());
  for (std::size_t i = 0; i < w.decay.size(); ++i) {
    terminal_scale_[i] = (w.w_start[i] + w.w_end[i] * w.decay[i]) / (2.0 * w.w_start[i]);
  }
}

Trajectory ControlProblem::restrict_control(const Trajectory& f) const {
  Trajectory out = f;
  for (int m = 0; m <= grid_.steps(); ++m) {
    if (m == 0 || m == grid_.steps()) {
      out[m] = SpectralField(lattice_);
    } else {
      out[m] = masked(f[m], plateau_);
    }
  }
  return out;
}

Trajectory ControlProblem::exterior(const Trajectory& u) const {
  Trajectory out = u;
  for (auto& s : out.states) s = masked(s, exterior_);
  return out;
}

Trajectory ControlProblem::forward(const Trajectory& f) const {
  return solve_fractional_diffusion(f.states, alpha_, grid_);
}

double ControlProblem::misfit(const Trajectory& u, const Trajectory& g) const {
  require_same_grid(u, g, "ControlProblem::misfit");
  double sum = 0.0;
  for (int m = 0; m <= grid_.steps(); ++m) {
    sum += grid_.weight(m) * masked_residual_energy(u[m], g[m], exterior_);
  }
  return 0.5 * sum;
}

double ControlProblem::objective(const Trajectory& f, const Trajectory& g) const {
  const auto fc = restrict_control(f);
  const auto u = forward(fc);
  return misfit(u, g) + 0.5 * lambda_ * space_time_inner(fc, fc);
}

Trajectory ControlProblem::gradient_from_response(const Trajectory& f, const Trajectory& u,
                                                  const Trajectory& g) const {
  std::vector<SpectralField> residual;
  residual.reserve(u.states.size());
  for (int m = 0; m <= grid_.steps(); ++m) {
    auto r = masked(masked(u[m], exterior_) - g[m], exterior_);
    residual.push_back(std::move(r));
  }
  auto terminal = residual.back().coeffs();
  for (std::size_t i = 0; i < terminal.size(); ++i) terminal[i] *= terminal_scale_[i];

  auto grad = restrict_control(solve_dual(residual, alpha_, grid_));
  if (lambda_ != 0.0) grad.axpy(lambda_, f);
  return grad;
}

Trajectory ControlProblem::gradient(const Trajectory& f, const Trajectory& g) const {
  const auto fc = restrict_control(f);
  return gradient_from_response(fc, forward(fc), g);
}

namespace {

Trajectory nodes_of(const SourceTerm& f, const TimeGrid& grid) {
  return Trajectory(grid, f.nodes(grid));
}

} // namespace

double control_objective(const SourceTerm& f, const Trajectory& g, const Window& window,
                         double alpha, const TimeGrid& grid, double lambda) {
  ControlProblem problem(window, alpha, grid, f.lattice(), lambda);
  return problem.objective(nodes_of(f, grid), g);
}

SourceTerm control_gradient(const SourceTerm& f, const Trajectory& g, const Window& window,
                            double alpha, const TimeGrid& grid, double lambda) {
  ControlProblem problem(window, alpha, grid, f.lattice(), lambda);
  auto grad = problem.gradient(nodes_of(f, grid), g);
  return SourceTerm::sampled(grid, std::move(grad.states), window);
}

SourceTerm ControlResult::source() const {
  return SourceTerm::sampled(f_opt.grid, f_opt.states);
}

ControlResult approximate_control(const Trajectory& g, const Window& window, double alpha,
                                  const TimeGrid& grid, double lambda,
                                  const ControlOptions& options) {
  if (!(lambda > 0.0)) {
    throw Error("approximate_control: lambda must be > 0 (the unregularized problem is ill-posed)");
  }
  if (!(g.grid == grid)) throw Error("approximate_control: target on a different time grid");
  const auto& lattice = g.lattice();
  ControlProblem problem(window, alpha, grid, lattice, lambda);

  const auto zero = Trajectory::zeros(grid, lattice);
  const double target_norm = std::sqrt(2.0 * problem.misfit(zero, g));

  // Normal operator H p = gradient(p; g = 0); b = -gradient(0; g).
  Trajectory x = zero;
  Trajectory ux = zero;
  Trajectory r = problem.gradient_from_response(zero, zero, g);
  r *= -1.0;
  Trajectory p = r;
  double rr = space_time_inner(r, r);
  const double r0 = std::sqrt(rr);

  ControlResult result{zero, {}, 1.0, false, false};
  auto record = [&](int it) {
    const double mis = problem.misfit(ux, g);
    const double obj = mis + 0.5 * lambda * space_time_inner(x, x);
    result.history.push_back({it, obj, mis, std::sqrt(rr)});
    return mis;
  };
  double mis = record(0);
  auto rel = [&](double m) { return target_norm > 0.0 ? std::sqrt(2.0 * m) / target_norm : 0.0; };

  if (r0 == 0.0) {
    result.converged = true;
    result.relative_residual = rel(mis);
    return result;
  }

  int it = 0;
  for (; it < options.maxiter; ++it) {
    if (std::sqrt(rr) <= options.gradient_tol * r0 ||
        (options.residual_target > 0.0 && rel(mis) <= options.residual_target)) {
      result.converged = true;
      break;
    }
    const auto up = problem.forward(p);
    const auto hp = problem.gradient_from_response(p, up, zero);
    const double php = space_time_inner(p, hp);
    if (!(php > 0.0)) break;
    const double step = rr / php;
    x.axpy(step, p);
    ux.axpy(step, up);
    r.axpy(-step, hp);
    const double rr_new = space_time_inner(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int m = 0; m <= grid.steps(); ++m) {
      p[m] *= beta;
      p[m] += r[m];
    }
    mis = record(it + 1);
  }
  if (!result.converged) {
    if (std::sqrt(rr) <= options.gradient_tol * r0 ||
        (options.residual_target > 0.0 && rel(mis) <= options.residual_target)) {
      result.converged = true;
    } else {
      result.maxiter_exhausted = it >= options.maxiter;
    }
  }
  result.f_opt = std::move(x);
  result.relative_residual = rel(mis);
  return result;
}

} // namespace asq
