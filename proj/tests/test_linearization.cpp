#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asq/error.hpp"
#include "asq/experiments.hpp"
#include "asq/linearization.hpp"
#include "asq/spectral_ops.hpp"

#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace asq;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
const std::vector<double> eps_list{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

SpectralField field(const FourierLattice& lat, double (*fn)(double, double)) {
  return sample_spectral(lat, fn);
}

// w(x, t) = shape(t) * profile(x) on the grid nodes.
Trajectory separable(const TimeGrid& grid, const SpectralField& profile, double (*shape)(double)) {
  std::vector<SpectralField> states;
  for (int m = 0; m <= grid.steps(); ++m) states.push_back(shape(grid.node(m)) * profile);
  return Trajectory(grid, std::move(states));
}

double max_state(const Trajectory& t) {
  double m = 0.0;
  for (const auto& s : t.states) m = std::max(m, s.max_abs());
  return m;
}

std::vector<double> column(const EpsSweep& s, const char* name) { return s.residuals.at(name); }

} // namespace

TEST_SUITE("time norms") {
  TEST_CASE("trapezoid L2-in-time and sup-in-time Sobolev norms") {
    const FourierLattice lat(16);
    const TimeGrid grid(1.0, 4);
    const auto c = field(lat, [](double x1, double) { return std::cos(two_pi * x1); });
    const auto h = separable(grid, c, [](double t) { return t; });
    // ||c||_{H^r} = 2^(r/2) / sqrt(2) for the |k| = 1 shell
    const double r = 1.5;
    const double hr = std::pow(2.0, r / 2) / std::sqrt(2.0);
    const double trap = 0.25 * (0.5 * 0 + 1.0 / 16 + 4.0 / 16 + 9.0 / 16 + 0.5 * 1.0);
    CHECK(time_l2_sobolev(h, r) == doctest::Approx(hr * std::sqrt(trap)).epsilon(1e-14));
    CHECK(time_sup_sobolev(h, r) == doctest::Approx(hr).epsilon(1e-14));
  }
}

TEST_SUITE("first linearization") {
  TEST_CASE("x1-only sources sit at the floor") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 100);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto f = scenarios::x1_only_source(lat, 1.0);
    for (double eps : {0.5, 1e-1, 1e-3}) {
      for (const auto& [name, value] : first_linearization_residual(f, eps, spec, 0.75, grid)) {
        CHECK(value <= 1e-9);
      }
    }
  }

  TEST_CASE("generic source: residual is first order in eps") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 100);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto f = scenarios::generic_source(lat);
    const auto sweep = first_order_sweep(f, f, FirstOrderVariant::direct, eps_list, spec, 0.75, grid);
    const auto fits = convergence_rate_fit(sweep);
    REQUIRE(fits.size() == 2);
    for (const char* name : {norm_names::l2_h2alpha, norm_names::linf_halpha}) {
      const double slope = oracle::loglog_slope(eps_list, column(sweep, name));
      CHECK(slope >= 0.85);
      CHECK(slope <= 1.15);
      CHECK(fits.at(name).slope == doctest::Approx(slope).epsilon(1e-12));
      CHECK(fits.at(name).points_used == 5);
    }
    // halving eps halves the residual
    const auto a = first_linearization_residual(f, 0.02, spec, 0.75, grid);
    const auto b = first_linearization_residual(f, 0.01, spec, 0.75, grid);
    CHECK(b.at(norm_names::l2_h2alpha) / a.at(norm_names::l2_h2alpha) == doctest::Approx(0.5).epsilon(0.05));
    // the sweep and the single-eps residual agree
    CHECK(sweep.residuals.at(norm_names::linf_halpha)[2] ==
          doctest::Approx(first_linearization_residual(f, 1e-2, spec, 0.75, grid).at(norm_names::linf_halpha)).epsilon(1e-14));
  }

  TEST_CASE("cross differences are first order as well") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 100);
    const auto spec = MultiplierSpec::perturbed(lat);
    const auto [f1, f2] = scenarios::cross_mode_sources(lat);
    for (auto variant : {FirstOrderVariant::cross1, FirstOrderVariant::cross2}) {
      const auto sweep = first_order_sweep(f1, f2, variant, eps_list, spec, 0.75, grid);
      for (const auto& [name, fit] : convergence_rate_fit(sweep)) {
        CHECK(fit.slope >= 0.85);
        CHECK(fit.slope <= 1.15);
      }
      const int j = variant == FirstOrderVariant::cross1 ? 1 : 2;
      const auto single = first_linearization_cross_residual(f1, f2, j, 3e-2, spec, 0.75, grid);
      CHECK(sweep.residuals.at(norm_names::l2_h2alpha)[1] ==
            doctest::Approx(single.at(norm_names::l2_h2alpha)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(first_linearization_cross_residual(f1, f2, 3, 0.1, spec, 0.75, grid), Error);
  }

  TEST_CASE("solution depends on the product eps f only") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 50);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto f = scenarios::generic_source(lat);
    const auto a = solve_active_scalar(f.scaled(2 * 0.05), spec, 0.75, grid);
    const auto b = solve_active_scalar(f.scaled(2.0).scaled(0.05), spec, 0.75, grid);
    CHECK(sup_difference(a, b) <= 1e-15 * max_state(a));
  }

  TEST_CASE("eps outside (0, 1) is rejected") {
    const FourierLattice lat(16);
    const TimeGrid grid(0.5, 10);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto f = scenarios::x1_only_source(lat);
    for (double eps : {0.0, 1.0, -0.1, 2.0}) {
      CHECK_THROWS_AS(first_linearization_residual(f, eps, spec, 0.75, grid), Error);
      CHECK_THROWS_AS(second_linearization_residual(f, f, eps, spec, 0.75, grid), Error);
    }
  }

  TEST_CASE("threaded sweeps equal sequential sweeps") {
    const FourierLattice lat(16);
    const TimeGrid grid(0.5, 40);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto f = scenarios::generic_source(lat);
    const auto a = first_order_sweep(f, f, FirstOrderVariant::direct, eps_list, spec, 0.75, grid, 1);
    const auto b = first_order_sweep(f, f, FirstOrderVariant::direct, eps_list, spec, 0.75, grid, 3);
    CHECK(a.residuals == b.residuals);
  }
}

TEST_SUITE("second linearization") {
  TEST_CASE("x1-only pair gives v = 0") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 50);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto w = solve_fractional_diffusion(scenarios::x1_only_source(lat), 0.75, grid);
    CHECK(max_state(solve_second_linearization(w, w, spec, 0.75)) <= 1e-15);
  }

  TEST_CASE("swapping the inputs leaves v unchanged") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 50);
    const auto spec = MultiplierSpec::perturbed(lat);
    const auto [f1, f2] = scenarios::cross_mode_sources(lat);
    const auto w1 = solve_fractional_diffusion(f1, 0.75, grid);
    const auto w2 = solve_fractional_diffusion(scenarios::generic_source(lat), 0.75, grid);
    const auto a = solve_second_linearization(w1, w2, spec, 0.75);
    const auto b = solve_second_linearization(w2, w1, spec, 0.75);
    CHECK(max_state(a) > 1e-6);
    CHECK(sup_difference(a, b) <= 1e-14 * max_state(a));
  }

  TEST_CASE("modes (1,0) and (0,1) interact only through (+-1, +-1)") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 50);
    const double alpha = 0.75;
    // m(k) = |k|^-1 (1 + cos(2 arg k) / 4): m(1,0) = 5/4, m(0,1) = 3/4
    const MultiplierSpec spec("anisotropic", Symbol([](int k1, int k2) {
                                const double r2 = double(k1) * k1 + double(k2) * k2;
                                return (1.0 + 0.25 * (double(k1) * k1 - double(k2) * k2) / r2) / std::sqrt(r2);
                              }),
                              0.75, 1.25, lat);
    const auto w1 = separable(grid, field(lat, [](double x1, double) { return std::cos(two_pi * x1); }),
                              [](double) { return 1.0; });
    const auto w2 = separable(grid, field(lat, [](double, double x2) { return std::cos(two_pi * x2); }),
                              [](double t) { return t; });
    const auto v = solve_second_linearization(w1, w2, spec, alpha);
    // source -4 pi^2 (m(1,0) - m(0,1)) t sin(2 pi x1) sin(2 pi x2)
    const double lambda = std::pow(two_pi * std::sqrt(2.0), 2 * alpha);
    const auto shape = field(lat, [](double x1, double x2) { return std::sin(two_pi * x1) * std::sin(two_pi * x2); });
    for (int m = 0; m <= grid.steps(); ++m) {
      const double c = -4.0 * pi * pi * 0.5 * oracle::duhamel_linear(lambda, grid.node(m));
      const auto expect = c * shape;
      CHECK(to_physical(v[m] - expect).max_abs() <= 1e-13 * std::max(1e-3, std::abs(c)));
      for (const auto& [k, value] : oracle::active_modes(v[m], 1e-14)) {
        CHECK(std::abs(k.first) == 1);
        CHECK(std::abs(k.second) == 1);
      }
    }
    // for a radial symbol the same pair does not interact
    CHECK(max_state(solve_second_linearization(w1, w2, MultiplierSpec::riesz(lat), alpha)) <= 1e-13);
  }

  TEST_CASE("modes (1,0) and (0,2) under the Riesz multiplier") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 50);
    const double alpha = 0.75;
    const auto w1 = separable(grid, field(lat, [](double x1, double) { return std::cos(two_pi * x1); }),
                              [](double) { return 1.0; });
    const auto w2 = separable(grid, field(lat, [](double, double x2) { return std::cos(2 * two_pi * x2); }),
                              [](double t) { return t; });
    const auto v = solve_second_linearization(w1, w2, MultiplierSpec::riesz(lat), alpha);
    // source -8 pi^2 (m(1,0) - m(0,2)) t sin(2 pi x1) sin(4 pi x2), m(1,0) - m(0,2) = 1/2
    const double lambda = std::pow(two_pi * std::sqrt(5.0), 2 * alpha);
    const auto shape = field(lat, [](double x1, double x2) { return std::sin(two_pi * x1) * std::sin(2 * two_pi * x2); });
    double worst = 0.0;
    for (int m = 0; m <= grid.steps(); ++m) {
      const double c = -4.0 * pi * pi * oracle::duhamel_linear(lambda, grid.node(m));
      worst = std::max(worst, to_physical(v[m] - c * shape).max_abs());
    }
    CHECK(worst <= 1e-13);
    CHECK(max_state(v) > 1e-3);
  }

  TEST_CASE("grid mismatch is rejected") {
    const FourierLattice lat(16);
    const auto a = Trajectory::zeros(TimeGrid(0.5, 10), lat);
    const auto b = Trajectory::zeros(TimeGrid(0.5, 12), lat);
    CHECK_THROWS_AS(solve_second_linearization(a, b, MultiplierSpec::riesz(lat), 0.75), Error);
    const auto big = Trajectory::zeros(TimeGrid(0.5, 10), FourierLattice(32));
    CHECK_THROWS_AS(solve_second_linearization(big, big, MultiplierSpec::riesz(lat), 0.75), Error);
    CHECK_THROWS_AS(solve_second_linearization(a, big, MultiplierSpec::riesz(FourierLattice(32)), 0.75), Error);
  }

  TEST_CASE("x1-only pair: second-order residual at the floor") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 100);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto f1 = scenarios::x1_only_source(lat);
    const auto f2 = SourceTerm::bump(field(lat, [](double x1, double) { return std::sin(2 * two_pi * x1); }), 0.1, 0.4);
    const auto sweep = second_order_sweep(f1, f2, eps_list, spec, 0.75, grid);
    for (const auto& [name, values] : sweep.residuals) {
      for (double v : values) CHECK(v <= 1e-8);
    }
  }

  TEST_CASE("cross-mode pair: residual is first order in eps") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 100);
    const auto spec = MultiplierSpec::riesz(lat);
    const auto [f1, f2] = scenarios::cross_mode_sources(lat);
    const auto sweep = second_order_sweep(f1, f2, eps_list, spec, 0.75, grid);
    for (const char* name : {norm_names::l2_halpha, norm_names::c_l2}) {
      const double slope = oracle::loglog_slope(eps_list, column(sweep, name));
      CHECK(slope >= 0.85);
      CHECK(slope <= 1.15);
    }
  }

  TEST_CASE("residual under a second spec uses that spec's v") {
    const FourierLattice lat(32);
    const TimeGrid grid(0.5, 60);
    const auto spec2 = MultiplierSpec::perturbed(lat);
    const auto [f1, f2] = scenarios::cross_mode_sources(lat);
    const double eps = 0.05;
    const auto got = second_linearization_residual(f1, f2, eps, spec2, 0.75, grid);
    const auto w1 = solve_fractional_diffusion(f1, 0.75, grid);
    const auto w2 = solve_fractional_diffusion(f2, 0.75, grid);
    const auto v = solve_second_linearization(w1, w2, spec2, 0.75);
    auto h = solve_active_scalar((f1 + f2).scaled(eps), spec2, 0.75, grid);
    h -= solve_active_scalar(f1.scaled(eps), spec2, 0.75, grid);
    h -= solve_active_scalar(f2.scaled(eps), spec2, 0.75, grid);
    h *= 1.0 / (eps * eps);
    h -= v;
    CHECK(got.at(norm_names::c_l2) == doctest::Approx(time_sup_sobolev(h, 0.0)).epsilon(1e-14));
    CHECK(got.at(norm_names::l2_halpha) == doctest::Approx(time_l2_sobolev(h, 0.75)).epsilon(1e-14));
  }
}

TEST_SUITE("rate fit") {
  TEST_CASE("synthetic power laws") {
    EpsSweep s{eps_list, {}};
    for (double e : eps_list) {
      s.residuals["linear"].push_back(3.0 * e);
      s.residuals["quadratic"].push_back(0.2 * e * e);
    }
    const auto fits = convergence_rate_fit(s);
    CHECK(fits.at("linear").slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fits.at("linear").intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fits.at("linear").max_deviation <= 1e-12);
    CHECK(fits.at("quadratic").slope == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("residuals below the floor are excluded with a note") {
    EpsSweep s{eps_list, {{"r", {1e-1, 3e-2, 1e-2, 1e-16, 0.0}}}};
    const auto fit = convergence_rate_fit(s).at("r");
    CHECK(fit.points_used == 3);
    CHECK(fit.notes.size() == 2);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("invalid sweeps are rejected") {
    CHECK_THROWS_AS(convergence_rate_fit(EpsSweep{eps_list, {{"r", {1e-1, 3e-2, -1e-2, 3e-3, 1e-3}}}}), Error);
    CHECK_THROWS_AS(convergence_rate_fit(EpsSweep{eps_list, {{"r", {1e-1, 1e-15, 1e-16, 3e-17, 1e-3}}}}), Error);
    CHECK_THROWS_AS(convergence_rate_fit(EpsSweep{{0.1, 0.2, 0.05}, {{"r", {1, 2, 3}}}}), Error);
    CHECK_THROWS_AS(convergence_rate_fit(EpsSweep{{1.5, 0.2, 0.05}, {{"r", {1, 2, 3}}}}), Error);
    CHECK_THROWS_AS(convergence_rate_fit(EpsSweep{{0.3, 0.2, 0.05}, {{"r", {1, 2}}}}), Error);
    CHECK_THROWS_AS(EpsSweep{}.validate(), Error);
  }

  TEST_CASE("default epsilons") { CHECK(default_epsilons() == eps_list); }
}
