#include "asq/linearization.hpp"

#include "asq/error.hpp"
#include "asq/parallel.hpp"
#include "asq/spectral_ops.hpp"

#include <fmt/format.h>

#include <cmath>

namespace asq {

double time_l2_sobolev(const Trajectory& h, double r) {
  double sum = 0.0;
  for (int m = 0; m <= h.grid.steps(); ++m) {
    const double s = sobolev_norm(h[m], r);
    sum += h.grid.weight(m) * s * s;
  }
  return std::sqrt(sum);
}

double time_sup_sobolev(const Trajectory& h, double r) {
  double best = 0.0;
  for (const auto& s : h.states) best = std::max(best, sobolev_norm(s, r));
  return best;
}

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(fmt::format("epsilon must lie in (0, 1), got {}", eps));
}

NamedNorms first_order_norms(const Trajectory& h, double alpha) {
  return {{norm_names::l2_h2alpha, time_l2_sobolev(h, 2.0 * alpha)},
          {norm_names::linf_halpha, time_sup_sobolev(h, alpha)}};
}

NamedNorms second_order_norms(const Trajectory& h, double alpha) {
  return {{norm_names::l2_halpha, time_l2_sobolev(h, alpha)},
          {norm_names::c_l2, time_sup_sobolev(h, 0.0)}};
}

Trajectory first_order_h(const Trajectory& theta_eps, const Trajectory& w, double eps) {
  Trajectory h = theta_eps;
  h *= 1.0 / eps;
  h -= w;
  return h;
}

Trajectory cross_h(const Trajectory& theta_sum, const Trajectory& theta_j, const Trajectory& w_other,
                   double eps) {
  Trajectory h = theta_sum - theta_j;
  h *= 1.0 / eps;
  h -= w_other;
  return h;
}

Trajectory second_order_h(const Trajectory& theta_sum, const Trajectory& theta_1,
                          const Trajectory& theta_2, const Trajectory& v, double eps) {
  Trajectory h = theta_sum - theta_1;
  h -= theta_2;
  h *= 1.0 / (eps * eps);
  h -= v;
  return h;
}

} // namespace

NamedNorms first_linearization_residual(const SourceTerm& f, double eps,
                                        const MultiplierSpec& spec, double alpha,
                                        const TimeGrid& grid) {
  require_eps(eps);
  const auto w = solve_fractional_diffusion(f, alpha, grid);
  const auto theta = solve_active_scalar(f.scaled(eps), spec, alpha, grid);
  return first_order_norms(first_order_h(theta, w, eps), alpha);
}

NamedNorms first_linearization_cross_residual(const SourceTerm& f1, const SourceTerm& f2, int j,
                                              double eps, const MultiplierSpec& spec,
                                              double alpha, const TimeGrid& grid) {
  require_eps(eps);
  if (j != 1 && j != 2) throw Error("cross residual: j must be 1 or 2");
  const auto& fj = j == 1 ? f1 : f2;
  const auto& fo = j == 1 ? f2 : f1;
  const auto w_other = solve_fractional_diffusion(fo, alpha, grid);
  const auto theta_sum = solve_active_scalar((f1 + f2).scaled(eps), spec, alpha, grid);
  const auto theta_j = solve_active_scalar(fj.scaled(eps), spec, alpha, grid);
  return first_order_norms(cross_h(theta_sum, theta_j, w_other, eps), alpha);
}

Trajectory solve_second_linearization(const Trajectory& w1, const Trajectory& w2,
                                      const Symbol& symbol, double alpha) {
  require_same_grid(w1, w2, "solve_second_linearization");
  std::vector<SpectralField> source;
  source.reserve(w1.states.size());
  for (int m = 0; m <= w1.grid.steps(); ++m) {
    SpectralField s = transport(w1[m], w2[m], symbol);
    s += transport(w2[m], w1[m], symbol);
    s *= -1.0;
    source.push_back(std::move(s));
  }
  return solve_fractional_diffusion(source, alpha, w1.grid);
}

Trajectory solve_second_linearization(const Trajectory& w1, const Trajectory& w2,
                                      const MultiplierSpec& spec, double alpha) {
  if (!spec.compatible(w1.lattice())) throw Error("solve_second_linearization: lattice mismatch");
  return solve_second_linearization(w1, w2, spec.symbol(), alpha);
}

NamedNorms second_linearization_residual(const SourceTerm& f1, const SourceTerm& f2, double eps,
                                         const MultiplierSpec& spec, double alpha,
                                         const TimeGrid& grid) {
  require_eps(eps);
  const auto w1 = solve_fractional_diffusion(f1, alpha, grid);
  const auto w2 = solve_fractional_diffusion(f2, alpha, grid);
  const auto v = solve_second_linearization(w1, w2, spec, alpha);
  const auto t12 = solve_active_scalar((f1 + f2).scaled(eps), spec, alpha, grid);
  const auto t1 = solve_active_scalar(f1.scaled(eps), spec, alpha, grid);
  const auto t2 = solve_active_scalar(f2.scaled(eps), spec, alpha, grid);
  return second_order_norms(second_order_h(t12, t1, t2, v, eps), alpha);
}

void EpsSweep::validate() const {
  if (epsilons.empty()) throw Error("EpsSweep: no epsilons");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0)) throw Error("EpsSweep: epsilons must lie in (0, 1)");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw Error("EpsSweep: epsilons must be strictly decreasing");
    }
  }
  for (const auto& [name, r] : residuals) {
    if (r.size() != epsilons.size()) throw Error("EpsSweep: residual count mismatch for " + name);
  }
}

std::map<std::string, RateFit> convergence_rate_fit(const EpsSweep& sweep) {
  sweep.validate();
  std::map<std::string, RateFit> out;
  for (const auto& [name, r] : sweep.residuals) {
    RateFit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] < 0.0 || !std::isfinite(r[i])) {
        throw Error(fmt::format("convergence_rate_fit: invalid residual {} for {}", r[i], name));
      }
      if (r[i] < residual_floor) {
        fit.notes.push_back(fmt::format("eps={:g} excluded: residual {:.3g} below floor", sweep.epsilons[i], r[i]));
        continue;
      }
      xs.push_back(std::log(sweep.epsilons[i]));
      ys.push_back(std::log(r[i]));
    }
    fit.points_used = static_cast<int>(xs.size());
    if (xs.size() < 3) {
      throw Error(fmt::format("convergence_rate_fit: {} has {} usable points, need 3", name, xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      fit.max_deviation =
          std::max(fit.max_deviation, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
    }
    out.emplace(name, std::move(fit));
  }
  return out;
}

std::vector<double> default_epsilons() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

EpsSweep first_order_sweep(const SourceTerm& f1, const SourceTerm& f2, FirstOrderVariant variant,
                           const std::vector<double>& epsilons, const MultiplierSpec& spec,
                           double alpha, const TimeGrid& grid, int threads) {
  EpsSweep sweep{epsilons, {}};
  sweep.validate();
  for (double e : epsilons) require_eps(e);
  const bool direct = variant == FirstOrderVariant::direct;
  const auto& fj = variant == FirstOrderVariant::cross2 ? f2 : f1;
  const auto& fo = variant == FirstOrderVariant::cross2 ? f1 : f2;
  const auto w = solve_fractional_diffusion(direct ? f1 : fo, alpha, grid);
  const auto f_sum = f1 + f2;

  std::vector<NamedNorms> results(epsilons.size());
  parallel_for(epsilons.size(), threads, [&](std::size_t i) {
    const double eps = epsilons[i];
    if (direct) {
      const auto theta = solve_active_scalar(f1.scaled(eps), spec, alpha, grid);
      results[i] = first_order_norms(first_order_h(theta, w, eps), alpha);
    } else {
      const auto theta_sum = solve_active_scalar(f_sum.scaled(eps), spec, alpha, grid);
      const auto theta_j = solve_active_scalar(fj.scaled(eps), spec, alpha, grid);
      results[i] = first_order_norms(cross_h(theta_sum, theta_j, w, eps), alpha);
    }
  });
  for (const auto& r : results) {
    for (const auto& [name, value] : r) sweep.residuals[name].push_back(value);
  }
  return sweep;
}

EpsSweep second_order_sweep(const SourceTerm& f1, const SourceTerm& f2,
                            const std::vector<double>& epsilons, const MultiplierSpec& spec,
                            double alpha, const TimeGrid& grid, int threads) {
  EpsSweep sweep{epsilons, {}};
  sweep.validate();
  const auto w1 = solve_fractional_diffusion(f1, alpha, grid);
  const auto w2 = solve_fractional_diffusion(f2, alpha, grid);
  const auto v = solve_second_linearization(w1, w2, spec, alpha);
  const auto f_sum = f1 + f2;

  std::vector<NamedNorms> results(epsilons.size());
  parallel_for(epsilons.size(), threads, [&](std::size_t i) {
    const double eps = epsilons[i];
    const auto t12 = solve_active_scalar(f_sum.scaled(eps), spec, alpha, grid);
    const auto t1 = solve_active_scalar(f1.scaled(eps), spec, alpha, grid);
    const auto t2 = solve_active_scalar(f2.scaled(eps), spec, alpha, grid);
    results[i] = second_order_norms(second_order_h(t12, t1, t2, v, eps), alpha);
  });
  for (const auto& r : results) {
    for (const auto& [name, value] : r) sweep.residuals[name].push_back(value);
  }
  return sweep;
}

} // namespace asq
