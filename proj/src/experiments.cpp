#include "asq/experiments.hpp"

#include "asq/diagnostics.hpp"
#include "asq/error.hpp"
#include "asq/fft.hpp"
#include "asq/inverse.hpp"
#include "asq/linearization.hpp"
#include "asq/runge.hpp"
#include "asq/spectral_ops.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace asq {

using nlohmann::json;

namespace scenarios {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SpectralField window_profile(const FourierLattice& lattice, const Window& window,
                             const std::function<double(double, double)>& shape) {
  const auto c = window.center();
  const double r = window.radius();
  return sample_spectral(lattice, [&](double x1, double x2) {
    const double m = window.mask_at(x1, x2);
    if (m == 0.0) return 0.0;
    const auto d = torus_displacement({x1, x2}, c);
    return m * shape(d[0] / r, d[1] / r);
  });
}

} // namespace

std::vector<SourceTerm> source_basket(const FourierLattice& lattice, const Window& window) {
  constexpr double amplitude = 50.0;
  std::vector<SourceTerm> basket;
  basket.push_back(SourceTerm::bump(
      window_profile(lattice, window, [](double, double) { return amplitude; }), 0.05, 0.25,
      window));
  basket.push_back(SourceTerm::bump(
      window_profile(lattice, window, [](double y1, double) { return amplitude * y1; }), 0.1, 0.3,
      window));
  basket.push_back(SourceTerm::bump(
      window_profile(lattice, window, [](double, double y2) { return amplitude * y2; }), 0.15,
      0.35, window));
  return basket;
}

std::pair<SourceTerm, SourceTerm> identity_sources(const FourierLattice& lattice,
                                                   const Window& window) {
  constexpr double amplitude = 100.0;
  auto f1 = SourceTerm::bump(
      window_profile(lattice, window, [](double, double) { return amplitude; }), 0.05, 0.3,
      window);
  auto f2 = SourceTerm::bump(window_profile(lattice, window,
                                            [](double y1, double y2) {
                                              return amplitude * (y1 + 0.5 * y2);
                                            }),
                             0.1, 0.35, window);
  return {std::move(f1), std::move(f2)};
}

SpectralField identity_test_function(const FourierLattice& lattice, const Window& window) {
  const auto c = window.center();
  const std::array<double, 2> center{c[0] + 0.3, c[1] + 0.1};
  constexpr double width = 0.15;
  return sample_spectral(lattice, [&](double x1, double x2) {
    const double d = torus_distance({x1, x2}, center) / width;
    return d < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - d * d)) : 0.0;
  });
}

SourceTerm x1_only_source(const FourierLattice& lattice, double amplitude) {
  return SourceTerm::bump(
      sample_spectral(lattice,
                      [&](double x1, double) { return amplitude * std::cos(two_pi * x1); }),
      0.05, 0.45);
}

SourceTerm generic_source(const FourierLattice& lattice) {
  return SourceTerm::bump(sample_spectral(lattice,
                                          [](double x1, double x2) {
                                            return std::cos(two_pi * x1) +
                                                   0.5 * std::sin(two_pi * (x1 + x2));
                                          }),
                          0.05, 0.45);
}

std::pair<SourceTerm, SourceTerm> cross_mode_sources(const FourierLattice& lattice) {
  auto f1 = SourceTerm::bump(
      sample_spectral(lattice, [](double x1, double) { return std::cos(two_pi * x1); }), 0.05,
      0.45);
  auto f2 = SourceTerm::bump(
      sample_spectral(lattice, [](double, double x2) { return std::cos(2.0 * two_pi * x2); }),
      0.05, 0.45);
  return {std::move(f1), std::move(f2)};
}

Trajectory planted_control(const FourierLattice& lattice, const Window& window, double alpha,
                           const TimeGrid& grid) {
  const auto shape = sample_spectral(lattice, [&](double x1, double x2) {
    return window.exterior_at(x1, x2) * std::cos(two_pi * x1);
  });
  std::vector<SpectralField> nodes;
  nodes.reserve(static_cast<std::size_t>(grid.steps()) + 1);
  const double t_end = grid.final_time();
  for (int m = 0; m <= grid.steps(); ++m) {
    nodes.push_back(shape * temporal_bump(grid.node(m), 0.1 * t_end, 0.9 * t_end));
  }
  const Trajectory h(grid, std::move(nodes));
  const ControlProblem problem(window, alpha, grid, lattice, 0.0);
  const auto zero = Trajectory::zeros(grid, lattice);
  return -1.0 * problem.gradient_from_response(zero, zero, h);
}

Trajectory generic_control_target(const FourierLattice& lattice, const Window& window,
                                  const TimeGrid& grid) {
  const auto c = window.center();
  constexpr double sigma = 0.4;
  const auto shape = sample_spectral(lattice, [&](double x1, double x2) {
    const double d = torus_distance({x1, x2}, c);
    return window.exterior_at(x1, x2) * std::exp(-d * d / (2.0 * sigma * sigma));
  });
  std::vector<SpectralField> nodes;
  nodes.reserve(static_cast<std::size_t>(grid.steps()) + 1);
  for (int m = 0; m <= grid.steps(); ++m) {
    nodes.push_back(shape * temporal_bump(grid.node(m), 0.0, 1.5));
  }
  return Trajectory(grid, std::move(nodes));
}

SpectralField random_smooth_field(const FourierLattice& lattice, std::mt19937_64& rng,
                                  int kmax) {
  std::normal_distribution<double> normal;
  SpectralField field(lattice);
  for (int i2 = 0; i2 < lattice.n(); ++i2) {
    for (int i1 = 0; i1 < lattice.half(); ++i1) {
      const int k1 = lattice.k1(i1);
      const int k2 = lattice.k2(i2);
      if (std::abs(k1) > kmax || std::abs(k2) > kmax) continue;
      const double damp = std::exp(-double(k1 * k1 + k2 * k2) / double(kmax * kmax));
      const double re = normal(rng);
      const double im = normal(rng);
      field.at(i2, i1) = damp * Complex(re, im);
    }
  }
  field.project_hermitian();
  return field;
}

} // namespace scenarios

namespace {

constexpr double spectral_tol = 1e-12;
constexpr double amplitude_tol = 1e-5;
constexpr double refinement_low = 3.5;
constexpr double refinement_high = 4.5;
constexpr double symmetry_tol = 1e-9;
constexpr double adjoint_tol = 1e-6;
constexpr double slope_low = 0.85;
constexpr double slope_high = 1.15;
constexpr double x1_floor_tol = 1e-8;
constexpr double identity_floor_tol = 1e-10;
constexpr double identity_ratio = 1e3;
constexpr double perp_tol = 1e-10;
constexpr double reconstruction_tol = 0.10;
constexpr double planted_tol = 1e-3;
constexpr double generic_tol = 0.2;
constexpr double fd_tol = 1e-4;

std::string num(double v) { return fmt::format("{}", v); }

json criterion_json(const CriterionResult& c) {
  return {{"id", c.id},         {"name", c.name}, {"value", c.value},
          {"threshold", c.threshold}, {"pass", c.pass}, {"detail", c.detail}};
}

std::string sha256_hex(const std::vector<std::pair<std::string, std::string>>& parts) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256: digest initialisation failed");
  }
  for (const auto& [name, body] : parts) {
    EVP_DigestUpdate(ctx, name.data(), name.size());
    EVP_DigestUpdate(ctx, "\0", 1);
    EVP_DigestUpdate(ctx, body.data(), body.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

/// Collects the deterministic artifacts of one run and writes them together
/// with the manifest.
class RunArtifacts {
public:
  RunArtifacts(const ExperimentConfig& config, std::string subcommand)
      : config_(config),
        subcommand_(std::move(subcommand)),
        dir_(config.output_dir / subcommand_),
        start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void add(const std::string& name, std::string body) {
    write_file(dir_ / name, body);
    files_.emplace_back(name, std::move(body));
  }

  void finish(const std::vector<CriterionResult>& criteria, json extra = json::object()) {
    json summary = std::move(extra);
    summary["subcommand"] = subcommand_;
    json rows = json::array();
    for (const auto& c : criteria) rows.push_back(criterion_json(c));
    summary["criteria"] = rows;
    add("summary.json", summary.dump(2) + "\n");

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json names = json::array();
    for (const auto& f : files_) names.push_back(f.first);
    const json manifest = {{"subcommand", subcommand_},
                           {"config", to_ini(config_)},
                           {"content_sha256", sha256_hex(files_)},
                           {"files", names},
                           {"wall_time_seconds", wall},
                           {"finished_at_unix", static_cast<long long>(std::time(nullptr))}};
    write_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

private:
  static void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << body;
  }

  const ExperimentConfig& config_;
  std::string subcommand_;
  std::filesystem::path dir_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string sweep_csv(const EpsSweep& sweep) {
  std::string out = "epsilon,norm_name,residual\n";
  for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
    for (const auto& [name, values] : sweep.residuals) {
      out += fmt::format("{},\"{}\",{}\n", num(sweep.epsilons[i]), name, num(values[i]));
    }
  }
  return out;
}

std::string history_csv(const ControlResult& result) {
  std::string out = "iteration,objective,data_misfit,gradient_norm\n";
  for (const auto& h : result.history) {
    out += fmt::format("{},{},{},{}\n", h.iteration, num(h.objective), num(h.data_misfit),
                       num(h.gradient_norm));
  }
  return out;
}

bool objective_nonincreasing(const ControlResult& result) {
  for (std::size_t i = 1; i < result.history.size(); ++i) {
    const double prev = result.history[i - 1].objective;
    if (result.history[i].objective > prev * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

void log_criteria(std::ostream& log, const std::vector<CriterionResult>& criteria) {
  for (const auto& c : criteria) {
    log << fmt::format("[{}] criterion {:>2} {}: value {:.4g} (threshold {:.4g}) {}\n",
                       c.pass ? "PASS" : "FAIL", c.id, c.name, c.value, c.threshold, c.detail);
  }
}

FourierLattice lattice_of(const ExperimentConfig& c) { return FourierLattice(c.n); }
TimeGrid grid_of(const ExperimentConfig& c) { return TimeGrid(c.final_time, c.steps); }

// ---------------------------------------------------------------- forward

int run_forward(const ExperimentConfig& config, std::ostream& log) {
  RunArtifacts run(config, "forward");
  const auto lattice = lattice_of(config);
  const auto grid = grid_of(config);
  const auto spec = config.multiplier.build(lattice);
  const auto window = config.window();
  std::vector<CriterionResult> criteria;

  // Spectral exactness on random fields.
  std::mt19937_64 rng(config.rng_seed);
  double divergence = 0.0;
  double commutation = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto theta = scenarios::random_smooth_field(lattice, rng, lattice.n() / 4);
    const auto u = velocity(theta, spec);
    const double scale = std::max(u.u1.max_abs(), u.u2.max_abs());
    if (scale > 0.0) divergence = std::max(divergence, spectral_divergence(u) / scale);
    const auto a = apply_multiplier(fractional_laplacian(theta, config.alpha), spec);
    const auto b = fractional_laplacian(apply_multiplier(theta, spec), config.alpha);
    commutation = std::max(commutation, max_relative_difference(a, b));
  }
  const double spectral = std::max(divergence, commutation);
  criteria.push_back({1, "spectral exactness", spectral, spectral_tol, spectral <= spectral_tol,
                      fmt::format("divergence {:.3g}, commutation {:.3g}", divergence,
                                  commutation)});

  // Symmetry reduction on x1-only data.
  const auto f_x1 = scenarios::x1_only_source(lattice, 1.0);
  const double sym = sup_difference(solve_active_scalar(f_x1, spec, config.alpha, grid),
                                    solve_fractional_diffusion(f_x1, config.alpha, grid));
  criteria.push_back({3, "symmetry reduction", sym, symmetry_tol, sym <= symmetry_tol,
                      "sup over nodes of |theta - w| for cos(2 pi x1) beta(t)"});

  // Well-posedness diagnostic over the source basket.
  const auto basket = scenarios::source_basket(lattice, window);
  std::string csv =
      "source,t,l2_norm,l4_norm,l4_bound,lq_norm,lq_bound,bound_pass,max_speed,cfl_number\n";
  bool lq_pass = true;
  bool decreasing = true;
  double worst_ratio = 0.0;
  for (std::size_t s = 0; s < basket.size(); ++s) {
    std::vector<StepStats> stats;
    const auto theta = solve_active_scalar(basket[s], spec, config.alpha, grid, {}, &stats);
    const auto l4 = lq_bound_diagnostic(theta, basket[s], 4.0);
    const auto lq = lq_bound_check(theta, basket[s], config.q, config.alpha);
    const auto l2 = l2_history(theta);
    lq_pass = lq_pass && l4.pass() && lq.pass();
    decreasing = decreasing && strictly_decreasing_after(theta, basket[s].t_b());
    for (int m = 0; m <= grid.steps(); ++m) {
      const auto& a = l4.rows[static_cast<std::size_t>(m)];
      const auto& b = lq.rows[static_cast<std::size_t>(m)];
      if (a.rhs > 0.0) worst_ratio = std::max(worst_ratio, a.lhs / a.rhs);
      if (b.rhs > 0.0) worst_ratio = std::max(worst_ratio, b.lhs / b.rhs);
      const StepStats st = m == 0 ? StepStats{} : stats[static_cast<std::size_t>(m - 1)];
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", s, num(a.t), num(l2[m]), num(a.lhs),
                         num(a.rhs), num(b.lhs), num(b.rhs), a.pass && b.pass ? 1 : 0,
                         num(st.max_speed), num(st.cfl_number));
    }
    if (s == 0) {
      dump_trajectory(run.dir() / "theta_source0", theta, config.alpha,
                      {{"spec", spec.name()}});
    }
  }
  run.add("forward.csv", std::move(csv));
  criteria.push_back({10, "well-posedness diagnostic", worst_ratio, 1.0, lq_pass && decreasing,
                      fmt::format("max ||theta||_q / Q_t over q = 4 and q = {} is {:.4g}; L2 "
                                  "strictly decreasing after source support: {}",
                                  config.q, worst_ratio, decreasing ? "yes" : "no")});
  log_criteria(log, criteria);
  run.finish(criteria, {{"spec", spec.name()}});
  return exit_ok;
}

// ---------------------------------------------------------------- diffuse

double duhamel_sine(double lambda, double omega, double t) {
  return (lambda * std::sin(omega * t) - omega * std::cos(omega * t) +
          omega * std::exp(-lambda * t)) /
         (lambda * lambda + omega * omega);
}

double sine_source_error(const FourierLattice& lattice, double alpha, double final_time,
                         int steps, double omega) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const TimeGrid grid(final_time, steps);
  const auto profile =
      sample_spectral(lattice, [](double x1, double) { return std::cos(two_pi * x1); });
  const auto f = SourceTerm::separable(profile, [omega](double t) { return std::sin(omega * t); });
  const auto w = solve_fractional_diffusion(f, alpha, grid);
  const double lambda = std::pow(two_pi, 2.0 * alpha);
  double err = 0.0;
  for (int m = 0; m <= steps; ++m) {
    const double exact = 0.5 * duhamel_sine(lambda, omega, grid.node(m));
    err = std::max(err, std::abs(w[m].mode(1, 0).real() - exact));
  }
  return err;
}

int run_diffuse(const ExperimentConfig& config, std::ostream& log) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  RunArtifacts run(config, "diffuse");
  const auto lattice = lattice_of(config);
  const auto grid = grid_of(config);
  std::vector<CriterionResult> criteria;

  const auto profile =
      sample_spectral(lattice, [](double x1, double) { return std::cos(two_pi * x1); });
  const auto w = solve_fractional_diffusion(SourceTerm::steady(profile), config.alpha, grid);
  const double lambda = std::pow(two_pi, 2.0 * config.alpha);
  std::string csv = "t,computed,exact,abs_error\n";
  for (int m = 0; m <= grid.steps(); ++m) {
    const double t = grid.node(m);
    const double exact = 0.5 * (1.0 - std::exp(-lambda * t)) / lambda;
    const double got = w[m].mode(1, 0).real();
    csv += fmt::format("{},{},{},{}\n", num(t), num(got), num(exact), num(std::abs(got - exact)));
  }
  run.add("diffuse.csv", std::move(csv));

  const int probe = static_cast<int>(std::lround(0.1 / grid.dt()));
  const double t_probe = grid.node(probe);
  const double exact = 0.5 * (1.0 - std::exp(-lambda * t_probe)) / lambda;
  const double amp_err = std::abs(w[probe].mode(1, 0).real() - exact) / exact;

  constexpr double omega = 20.0;
  const double e1 = sine_source_error(lattice, config.alpha, config.final_time, config.steps, omega);
  const double e2 =
      sine_source_error(lattice, config.alpha, config.final_time, 2 * config.steps, omega);
  const double ratio = e1 / e2;
  std::string refine = "steps,max_abs_error\n";
  refine += fmt::format("{},{}\n{},{}\n", config.steps, num(e1), 2 * config.steps, num(e2));
  run.add("refinement.csv", std::move(refine));
  const bool ratio_ok = ratio >= refinement_low && ratio <= refinement_high;
  criteria.push_back({2, "linear solver oracle", amp_err, amplitude_tol,
                      amp_err <= amplitude_tol && ratio_ok,
                      fmt::format("amplitude at t = {} vs closed form; dt-halving ratio {:.3f} "
                                  "(cos(2 pi x1) sin({} t) source) in [{}, {}]",
                                  t_probe, ratio, omega, refinement_low, refinement_high)});

  // Adjoint identity on random smooth space-time pairs.
  std::mt19937_64 rng(config.rng_seed);
  const double final_time = config.final_time;
  std::uniform_real_distribution<double> start(0.04 * final_time, 0.4 * final_time);
  std::uniform_real_distribution<double> length(0.2 * final_time, 0.5 * final_time);
  std::string adj = "pair,forward_pairing,dual_pairing,relative_error\n";
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double fa = start(rng), fb = fa + length(rng);
    const double ga = start(rng), gb = ga + length(rng);
    const auto f = SourceTerm::bump(scenarios::random_smooth_field(lattice, rng, 6), fa, fb);
    const auto g = SourceTerm::bump(scenarios::random_smooth_field(lattice, rng, 6), ga, gb);
    const Trajectory fn(grid, f.nodes(grid));
    const Trajectory gn(grid, g.nodes(grid));
    const double lhs = space_time_inner(solve_fractional_diffusion(fn.states, config.alpha, grid), gn);
    const double rhs = space_time_inner(fn, solve_dual(gn.states, config.alpha, grid));
    const double rel = std::abs(lhs - rhs) /
                       std::sqrt(space_time_inner(fn, fn) * space_time_inner(gn, gn));
    worst = std::max(worst, rel);
    adj += fmt::format("{},{},{},{}\n", i, num(lhs), num(rhs), num(rel));
  }
  run.add("adjoint.csv", std::move(adj));
  criteria.push_back({4, "adjoint identity", worst, adjoint_tol, worst <= adjoint_tol,
                      "max over 10 random smooth pairs"});
  log_criteria(log, criteria);
  run.finish(criteria, {{"amplitude_relative_error", amp_err},
                        {"refinement_ratio", ratio},
                        {"lambda", lambda}});
  return exit_ok;
}

// ---------------------------------------------------------------- linearize

json fits_json(const std::map<std::string, RateFit>& fits) {
  json out = json::object();
  for (const auto& [name, fit] : fits) {
    out[name] = {{"slope", fit.slope},
                 {"intercept", fit.intercept},
                 {"max_deviation", fit.max_deviation},
                 {"points_used", fit.points_used},
                 {"notes", fit.notes}};
  }
  return out;
}

bool slopes_in_range(const std::map<std::string, RateFit>& fits, double& worst) {
  bool ok = !fits.empty();
  for (const auto& [name, fit] : fits) {
    const double dev = std::abs(fit.slope - 1.0);
    if (dev > std::abs(worst - 1.0)) worst = fit.slope;
    ok = ok && fit.slope >= slope_low && fit.slope <= slope_high;
  }
  return ok;
}

double sweep_max(const EpsSweep& sweep) {
  double m = 0.0;
  for (const auto& [name, values] : sweep.residuals) {
    for (double v : values) m = std::max(m, v);
  }
  return m;
}

int run_linearize(const ExperimentConfig& config, std::ostream& log) {
  RunArtifacts run(config, "linearize");
  const auto lattice = lattice_of(config);
  const auto grid = grid_of(config);
  const auto spec = config.multiplier.build(lattice);
  const auto& eps = config.epsilons;
  const int threads = config.threads;
  json slopes = json::object();

  const auto generic = scenarios::generic_source(lattice);
  const auto [c1, c2] = scenarios::cross_mode_sources(lattice);
  const auto x1 = scenarios::x1_only_source(lattice, 1.0);
  const auto x1b = SourceTerm::bump(
      sample_spectral(lattice,
                      [](double y1, double) { return std::sin(4.0 * std::numbers::pi * y1); }),
      0.1, 0.4);

  double worst_first = 1.0;
  bool first_ok = true;
  const std::pair<const char*, FirstOrderVariant> variants[] = {
      {"first_order", FirstOrderVariant::direct},
      {"first_order_cross1", FirstOrderVariant::cross1},
      {"first_order_cross2", FirstOrderVariant::cross2}};
  for (const auto& [name, variant] : variants) {
    const auto sweep = variant == FirstOrderVariant::direct
                           ? first_order_sweep(generic, generic, variant, eps, spec, config.alpha,
                                               grid, threads)
                           : first_order_sweep(c1, c2, variant, eps, spec, config.alpha, grid,
                                               threads);
    run.add(fmt::format("{}.csv", name), sweep_csv(sweep));
    const auto fits = convergence_rate_fit(sweep);
    slopes[name] = fits_json(fits);
    first_ok = slopes_in_range(fits, worst_first) && first_ok;
  }
  const auto second = second_order_sweep(c1, c2, eps, spec, config.alpha, grid, threads);
  run.add("second_order.csv", sweep_csv(second));
  const auto second_fits = convergence_rate_fit(second);
  slopes["second_order"] = fits_json(second_fits);
  double worst_second = 1.0;
  const bool second_ok = slopes_in_range(second_fits, worst_second);

  const auto x1_first = first_order_sweep(x1, x1, FirstOrderVariant::direct, eps, spec,
                                          config.alpha, grid, threads);
  run.add("first_order_x1.csv", sweep_csv(x1_first));
  const auto x1_second = second_order_sweep(x1, x1b, eps, spec, config.alpha, grid, threads);
  run.add("second_order_x1.csv", sweep_csv(x1_second));
  const double x1_floor = std::max(sweep_max(x1_first), sweep_max(x1_second));

  std::vector<CriterionResult> criteria;
  criteria.push_back({5, "first-order linearization", worst_first, slope_high, first_ok,
                      fmt::format("slope farthest from 1 over direct/cross1/cross2 in both norms; "
                                  "range [{}, {}]",
                                  slope_low, slope_high)});
  criteria.push_back({6, "second-order linearization", worst_second, slope_high,
                      second_ok && x1_floor <= x1_floor_tol,
                      fmt::format("slope farthest from 1 in both norms, range [{}, {}]; x1-only "
                                  "residual max {:.3g} (<= {})",
                                  slope_low, slope_high, x1_floor, x1_floor_tol)});
  log_criteria(log, criteria);
  run.finish(criteria, {{"slopes", slopes}, {"x1_only_max_residual", x1_floor}});
  return exit_ok;
}

// ---------------------------------------------------------------- runge

int run_runge(const ExperimentConfig& config, std::ostream& log) {
  RunArtifacts run(config, "runge");
  const auto lattice = lattice_of(config);
  const auto grid = grid_of(config);
  const auto window = config.window();
  const ControlOptions options{config.maxiter, 1e-12, 0.0};
  const double lambda_planted = config.lambdas.front();
  const double lambda_generic = config.lambdas.back();

  const ControlProblem planted_problem(window, config.alpha, grid, lattice, lambda_planted);
  const auto f_star = scenarios::planted_control(lattice, window, config.alpha, grid);
  const auto g_planted = planted_problem.exterior(planted_problem.forward(f_star));
  const auto planted =
      approximate_control(g_planted, window, config.alpha, grid, lambda_planted, options);
  run.add("runge_planted.csv", history_csv(planted));
  dump_trajectory(run.dir() / "f_opt_planted", planted.f_opt, config.alpha,
                  {{"lambda", num(lambda_planted)}});

  const auto g_generic = scenarios::generic_control_target(lattice, window, grid);
  std::string lambda_csv = "lambda,relative_residual,iterations,converged,maxiter_exhausted\n";
  double generic_residual = 1.0;
  bool monotone = objective_nonincreasing(planted);
  for (std::size_t i = 0; i < config.lambdas.size(); ++i) {
    const double lambda = config.lambdas[i];
    const auto result = approximate_control(g_generic, window, config.alpha, grid, lambda, options);
    monotone = monotone && objective_nonincreasing(result);
    run.add(fmt::format("runge_generic_{}.csv", i), history_csv(result));
    lambda_csv += fmt::format("{},{},{},{},{}\n", num(lambda), num(result.relative_residual),
                              result.history.size() - 1, result.converged ? 1 : 0,
                              result.maxiter_exhausted ? 1 : 0);
    if (i + 1 == config.lambdas.size()) {
      generic_residual = result.relative_residual;
      dump_trajectory(run.dir() / "f_opt_generic", result.f_opt, config.alpha,
                      {{"lambda", num(lambda)}});
    }
  }
  run.add("runge_lambda.csv", std::move(lambda_csv));

  // Adjoint gradient against central differences.
  const ControlProblem problem(window, config.alpha, grid, lattice, lambda_generic);
  std::mt19937_64 rng(config.rng_seed);
  auto random_control = [&] {
    const auto shape = scenarios::random_smooth_field(lattice, rng, 6);
    std::vector<SpectralField> nodes;
    for (int m = 0; m <= grid.steps(); ++m) {
      nodes.push_back(shape * temporal_bump(grid.node(m), 0.05 * config.final_time,
                                            0.9 * config.final_time));
    }
    return problem.restrict_control(Trajectory(grid, std::move(nodes)));
  };
  const auto f0 = random_control();
  const auto grad = problem.gradient(f0, g_generic);
  std::string fd_csv = "direction,adjoint,finite_difference,relative_error\n";
  double fd_worst = 0.0;
  constexpr double h = 1e-5;
  for (int i = 0; i < 10; ++i) {
    auto d = random_control();
    d *= std::sqrt(space_time_inner(f0, f0) / space_time_inner(d, d));
    auto fp = f0;
    fp.axpy(h, d);
    auto fm = f0;
    fm.axpy(-h, d);
    const double fd = (problem.objective(fp, g_generic) - problem.objective(fm, g_generic)) / (2 * h);
    const double adj = space_time_inner(grad, d);
    const double rel = std::abs(fd - adj) / std::max(std::abs(adj), 1e-300);
    fd_worst = std::max(fd_worst, rel);
    fd_csv += fmt::format("{},{},{},{}\n", i, num(adj), num(fd), num(rel));
  }
  run.add("gradient_check.csv", std::move(fd_csv));

  const bool pass = planted.relative_residual <= planted_tol &&
                    static_cast<int>(planted.history.size()) - 1 <= 50 &&
                    generic_residual <= generic_tol && monotone && fd_worst <= fd_tol;
  std::vector<CriterionResult> criteria{
      {9, "Runge control", planted.relative_residual, planted_tol, pass,
       fmt::format("planted (lambda {}) {:.3g} in {} iterations; generic (lambda {}) {:.3g} <= "
                   "{}; objective nonincreasing: {}; gradient vs finite differences {:.3g} <= {}",
                   lambda_planted, planted.relative_residual, planted.history.size() - 1,
                   lambda_generic, generic_residual, generic_tol, monotone ? "yes" : "no",
                   fd_worst, fd_tol)}};
  log_criteria(log, criteria);
  run.finish(criteria, {{"planted_relative_residual", planted.relative_residual},
                        {"generic_relative_residual", generic_residual},
                        {"gradient_check_max_relative_error", fd_worst},
                        {"objective_nonincreasing", monotone}});
  return exit_ok;
}

// ---------------------------------------------------------------- identity

int run_identity(const ExperimentConfig& config, std::ostream& log) {
  RunArtifacts run(config, "identity");
  const auto lattice = lattice_of(config);
  const auto grid = grid_of(config);
  const auto window = config.window();
  const auto spec1 = config.multiplier.build(lattice);
  const auto spec2 = config.comparison.build(lattice);
  const auto [f1, f2] = scenarios::identity_sources(lattice, window);
  const auto varphi = scenarios::identity_test_function(lattice, window);

  const double same = second_order_identity_residual(spec1, spec1, f1, f2, varphi, window,
                                                     config.alpha, grid);
  const double distinct = second_order_identity_residual(spec1, spec2, f1, f2, varphi, window,
                                                         config.alpha, grid);
  const double via_v =
      second_order_identity_via_v(spec1, spec2, f1, f2, varphi, config.alpha, grid);
  const double floor = std::max(std::abs(same), identity_floor_tol);

  std::mt19937_64 rng(config.rng_seed);
  const auto exterior = window.exterior_mask(lattice.n());
  const auto diff = difference(spec1, spec2);
  std::string perp_csv = "triple,velocity_form,perp_form,abs_difference\n";
  double perp_worst = 0.0;
  auto exterior_field = [&] {
    auto f = multiply_pointwise(scenarios::random_smooth_field(lattice, rng, 6), exterior);
    return f * (1.0 / std::sqrt(f.energy()));
  };
  for (int i = 0; i < 20; ++i) {
    const auto p1 = exterior_field();
    const auto p2 = exterior_field();
    const auto vp = exterior_field();
    const double a = static_pairing(diff, p1, p2, vp);
    const double b = static_pairing_perp_form(diff, p1, p2, vp);
    perp_worst = std::max(perp_worst, std::abs(a - b));
    perp_csv += fmt::format("{},{},{},{}\n", i, num(a), num(b), num(std::abs(a - b)));
  }
  run.add("perp_form.csv", std::move(perp_csv));

  const auto basket = scenarios::source_basket(lattice, window);
  const auto maps = maps_equal(spec1, spec2, basket, window, config.alpha, grid, 1e-6);

  std::string csv = "quantity,value\n";
  csv += fmt::format("residual_same_spec,{}\n", num(same));
  csv += fmt::format("residual_distinct_specs,{}\n", num(distinct));
  csv += fmt::format("residual_via_second_linearization,{}\n", num(via_v));
  csv += fmt::format("noise_floor,{}\n", num(floor));
  csv += fmt::format("maps_max_deviation,{}\n", num(maps.max_deviation));
  run.add("identity.csv", std::move(csv));

  const bool pass = std::abs(same) <= identity_floor_tol &&
                    std::abs(distinct) >= identity_ratio * floor && perp_worst <= perp_tol;
  std::vector<CriterionResult> criteria{
      {7, "integral identity", std::abs(distinct) / floor, identity_ratio, pass,
       fmt::format("same-spec residual {:.3g} (<= {}); distinct {:.6g} = {:.3g} x floor; via v "
                   "{:.6g}; grad-perp form max difference {:.3g} (<= {}); maps equal at 1e-6: {}",
                   same, identity_floor_tol, distinct, std::abs(distinct) / floor, via_v,
                   perp_worst, perp_tol, maps.equal ? "yes" : "no")}};
  log_criteria(log, criteria);
  run.finish(criteria, {{"residual_same_spec", same},
                        {"residual_distinct_specs", distinct},
                        {"residual_via_second_linearization", via_v},
                        {"perp_form_max_difference", perp_worst},
                        {"maps_equal", maps.equal},
                        {"maps_max_deviation", maps.max_deviation}});
  return exit_ok;
}

// ---------------------------------------------------------------- reconstruct

int run_reconstruct(const ExperimentConfig& config, std::ostream& log) {
  RunArtifacts run(config, "reconstruct");
  const auto lattice = lattice_of(config);
  const auto spec1 = config.multiplier.build(lattice);
  const auto spec2 = config.comparison.build(lattice);
  ProbeGeometry geometry;
  geometry.observation = config.window();
  geometry.coordinate_radius = config.coordinate_radius;

  const auto offsets = polar_offsets(config.offset_min, config.offset_max, config.offset_radii,
                                     config.offset_angles);
  const auto table = reconstruct_kernel_gradient(spec1, spec2, offsets, config.probe_width,
                                                 lattice, geometry, config.threads);
  std::string csv = "offset_x,offset_y,axis,sampled,truth,abs_error\n";
  double max_sample = 0.0;
  for (const auto& r : table.rows) {
    csv += fmt::format("{},{},{},{},{},{}\n", num(r.offset[0]), num(r.offset[1]), r.axis,
                       num(r.sampled), num(r.truth), num(r.abs_error));
    max_sample = std::max(max_sample, std::abs(r.sampled));
  }
  run.add("reconstruct.csv", std::move(csv));

  // Mollification error of the bumps against the point value, widths 0.1 and
  // 0.05, on offsets realizable with both widths.
  ProbeGeometry wide = geometry;
  wide.coordinate_radius = 0.45;
  const auto subset = polar_offsets(0.3, 0.4, 3, 8);
  std::string width_csv = "width,relative_error_vs_point,relative_error_vs_truth\n";
  std::vector<double> width_errors;
  for (double width : {0.1, 0.05}) {
    const auto t = reconstruct_kernel_gradient(spec1, spec2, subset, width, lattice, wide,
                                               config.threads);
    width_errors.push_back(t.sampled_vs_point_error);
    width_csv += fmt::format("{},{},{}\n", num(width), num(t.sampled_vs_point_error),
                             num(t.relative_l2_error));
  }
  run.add("width_refinement.csv", std::move(width_csv));
  const bool identical = max_sample == 0.0;
  const bool monotone = identical || width_errors[1] < width_errors[0];

  // Direct operator comparison on exterior test fields.
  std::mt19937_64 rng(config.rng_seed);
  const auto exterior = config.window().exterior_mask(lattice.n());
  std::vector<SpectralField> tests;
  for (int i = 0; i < 4; ++i) {
    tests.push_back(multiply_pointwise(scenarios::random_smooth_field(lattice, rng, 6), exterior));
  }
  const double gap = exterior_velocity_gap(spec1, spec2, tests, config.window());
  constexpr double matched_tol = 1e-8;
  const bool consistent = (max_sample <= matched_tol) == (gap <= matched_tol);

  const bool pass = table.relative_l2_error <= reconstruction_tol && monotone && consistent;
  std::vector<CriterionResult> criteria{
      {8, "kernel reconstruction", table.relative_l2_error, reconstruction_tol, pass,
       fmt::format("{} offsets, width {}; error vs point {:.4g} (width 0.1) -> {:.4g} (width "
                   "0.05); exterior velocity gap {:.3g}, consistent: {}",
                   offsets.size(), config.probe_width, width_errors[0], width_errors[1], gap,
                   consistent ? "yes" : "no")}};
  log_criteria(log, criteria);
  run.finish(criteria, {{"relative_l2_error", table.relative_l2_error},
                        {"threshold", reconstruction_tol},
                        {"pass", pass},
                        {"mollification_error", table.mollification_error},
                        {"width_errors_vs_point", width_errors},
                        {"exterior_velocity_gap", gap}});
  return exit_ok;
}

// ---------------------------------------------------------------- report

int run_report(const ExperimentConfig& config, std::ostream& log) {
  RunArtifacts run(config, "report");
  std::vector<std::string> missing;
  std::map<int, std::pair<CriterionResult, std::string>> found;
  for (const char* sub : subcommands) {
    if (std::string(sub) == "report") continue;
    const auto path = config.output_dir / sub / "summary.json";
    std::ifstream in(path);
    if (!in) {
      missing.push_back(sub);
      continue;
    }
    json summary;
    try {
      summary = json::parse(in);
      for (const auto& c : summary.at("criteria")) {
        const auto value = c.at("value").is_null() ? std::nan("") : c.at("value").get<double>();
        CriterionResult r{c.at("id").get<int>(),        c.at("name").get<std::string>(),
                          value,                        c.at("threshold").get<double>(),
                          c.at("pass").get<bool>(),     c.at("detail").get<std::string>()};
        found[r.id] = {r, sub};
      }
    } catch (const json::exception& e) {
      throw Error(fmt::format("{}: malformed summary ({})", path.string(), e.what()));
    }
  }
  std::string csv = "criterion,name,value,threshold,pass,subcommand\n";
  json rows = json::array();
  bool all_pass = missing.empty();
  for (int id = 1; id <= 10; ++id) {
    const auto it = found.find(id);
    if (it == found.end()) {
      all_pass = false;
      csv += fmt::format("{},,,,0,missing\n", id);
      log << fmt::format("[MISSING] criterion {:>2}\n", id);
      continue;
    }
    const auto& [c, sub] = it->second;
    all_pass = all_pass && c.pass;
    csv += fmt::format("{},{},{},{},{},{}\n", id, c.name, num(c.value), num(c.threshold),
                       c.pass ? 1 : 0, sub);
    auto row = criterion_json(c);
    row["subcommand"] = sub;
    rows.push_back(row);
    log << fmt::format("[{}] criterion {:>2} {} ({}): {}\n", c.pass ? "PASS" : "FAIL", id, c.name,
                       sub, c.detail);
  }
  for (const auto& m : missing) log << fmt::format("missing prior run: {}\n", m);
  run.add("report.csv", std::move(csv));
  run.finish({}, {{"table", rows}, {"missing_runs", missing}, {"all_pass", all_pass}});
  return all_pass ? exit_ok : exit_acceptance;
}

} // namespace

int run_subcommand(const std::string& subcommand, const ExperimentConfig& config,
                   std::ostream& log) {
  config.validate();
  if (subcommand == "forward") return run_forward(config, log);
  if (subcommand == "diffuse") return run_diffuse(config, log);
  if (subcommand == "linearize") return run_linearize(config, log);
  if (subcommand == "runge") return run_runge(config, log);
  if (subcommand == "identity") return run_identity(config, log);
  if (subcommand == "reconstruct") return run_reconstruct(config, log);
  if (subcommand == "report") return run_report(config, log);
  throw ConfigError("subcommand", fmt::format("unknown subcommand '{}'", subcommand));
}

int exit_status_for(const std::exception& error, std::ostream& err) {
  if (const auto* c = dynamic_cast<const ConfigError*>(&error)) {
    err << fmt::format("config error in {}: {}\n", c->field(), c->what());
    return exit_config;
  }
  if (const auto* s = dynamic_cast<const SolverError*>(&error)) {
    err << fmt::format("solver failure at step {}: {}\n", s->step(), s->what());
    return exit_solver;
  }
  err << fmt::format("error: {}\n", error.what());
  return exit_config;
}

} // namespace asq
