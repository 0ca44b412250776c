#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asq/error.hpp"
#include "asq/experiments.hpp"
#include "asq/inverse.hpp"
#include "asq/spectral_ops.hpp"

#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace asq;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double alpha = 0.75;

/// int a b c dx for trigonometric polynomials, summing p + q + r = 0.
double triple_integral(const oracle::Coeffs& a, const oracle::Coeffs& b, const oracle::Coeffs& c) {
  oracle::Complex sum = 0.0;
  for (const auto& [p, ap] : a) {
    for (const auto& [q, bq] : b) {
      const auto it = c.find({-p.first - q.first, -p.second - q.second});
      if (it != c.end()) sum += ap * bq * it->second;
    }
  }
  return sum.real();
}

oracle::Coeffs scaled(const oracle::Coeffs& f, const std::function<oracle::Complex(int, int)>& s) {
  oracle::Coeffs out;
  for (const auto& [k, v] : f) out[k] = s(k.first, k.second) * v;
  return out;
}

/// Velocity-form pairing by direct Fourier sums.
double pairing_oracle(const Symbol& m, const SpectralField& phi1, const SpectralField& phi2,
                      const SpectralField& varphi) {
  const auto a1 = oracle::active_modes(phi1, 1e-300);
  const auto a2 = oracle::active_modes(phi2, 1e-300);
  const auto vp = oracle::active_modes(varphi, 1e-300);
  const auto i = oracle::Complex(0.0, 1.0);
  auto v1 = [&](const oracle::Coeffs& f) {
    return scaled(f, [&](int k1, int k2) { return -i * two_pi * double(k2) * m(k1, k2); });
  };
  auto v2 = [&](const oracle::Coeffs& f) {
    return scaled(f, [&](int k1, int k2) { return i * two_pi * double(k1) * m(k1, k2); });
  };
  const auto g1 = scaled(vp, [&](int k1, int) { return i * two_pi * double(k1); });
  const auto g2 = scaled(vp, [&](int, int k2) { return i * two_pi * double(k2); });
  return triple_integral(a2, v1(a1), g1) + triple_integral(a2, v2(a1), g2) +
         triple_integral(a1, v1(a2), g1) + triple_integral(a1, v2(a2), g2);
}

struct Setup {
  FourierLattice lattice{32};
  TimeGrid grid{0.4, 40};
  Window window{{0.0, 0.0}, 0.2};
};

struct IdentitySetup {
  FourierLattice lattice{64};
  TimeGrid grid{0.4, 40};
  Window window{{0.0, 0.0}, 0.1};
};

SourceTerm window_source(const Setup& s, double amplitude) {
  const auto profile = sample_spectral(s.lattice, [&](double x1, double x2) {
    return amplitude * s.window.mask_at(x1, x2) * (1.0 + 3.0 * x1 - 2.0 * x2);
  });
  return SourceTerm::bump(profile, 0.05, 0.3, s.window);
}

SpectralField exterior_field(const FourierLattice& lat, std::array<double, 2> c, double width) {
  return sample_spectral(lat, [&](double x1, double x2) {
    const double d = torus_distance({x1, x2}, c) / width;
    return d < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - d * d)) : 0.0;
  });
}

} // namespace

TEST_SUITE("source-to-solution map") {
  TEST_CASE("sources outside the window are rejected") {
    const Setup s;
    const auto outside = SourceTerm::bump(
        sample_spectral(s.lattice, [](double x1, double) { return std::cos(two_pi * x1); }), 0.05,
        0.3);
    CHECK_THROWS_AS(require_supported_in(outside, s.window, s.grid), Error);
    CHECK_THROWS_AS(
        source_to_solution(outside, MultiplierSpec::riesz(s.lattice), s.window, alpha, s.grid),
        Error);
    CHECK_NOTHROW(require_supported_in(window_source(s, 1.0), s.window, s.grid));
  }

  TEST_CASE("zero source gives a zero measurement") {
    const Setup s;
    const auto m = source_to_solution(SourceTerm::zero(s.lattice), MultiplierSpec::riesz(s.lattice),
                                      s.window, alpha, s.grid);
    for (const auto* t : {&m.theta_w, &m.u1_w, &m.u2_w}) {
      for (const auto& st : t->states) CHECK(st.max_abs() == 0.0);
    }
  }

  TEST_CASE("measurement is the masked solution and velocity") {
    const Setup s;
    const auto spec = MultiplierSpec::riesz(s.lattice);
    const auto f = window_source(s, 20.0);
    const auto m = source_to_solution(f, spec, s.window, alpha, s.grid);
    const auto theta = solve_active_scalar(f, spec, alpha, s.grid);
    const auto mask = s.window.mask(s.lattice.n());
    const int k = s.grid.steps() / 2;
    const auto pt = to_physical(theta[k]);
    const auto u = velocity(theta[k], spec);
    const auto pu1 = to_physical(u.u1);
    const auto pm = to_physical(m.theta_w[k]);
    const auto pm1 = to_physical(m.u1_w[k]);
    double worst = 0.0;
    for (std::size_t i = 0; i < pt.values.size(); ++i) {
      worst = std::max(worst, std::abs(pm.values[i] - mask.values[i] * pt.values[i]));
      worst = std::max(worst, std::abs(pm1.values[i] - mask.values[i] * pu1.values[i]));
    }
    CHECK(worst < 1e-12);
    CHECK(m.theta_w[k].max_abs() > 0.0);
  }

  TEST_CASE("identical specs give identical measurements, distinct specs differ") {
    const Setup s;
    const auto f = window_source(s, 50.0);
    const auto riesz = MultiplierSpec::riesz(s.lattice);
    const auto pert = MultiplierSpec::perturbed(s.lattice);
    const auto a = source_to_solution(f, riesz, s.window, alpha, s.grid);
    const auto b = source_to_solution(f, riesz, s.window, alpha, s.grid);
    const auto c = source_to_solution(f, pert, s.window, alpha, s.grid);
    CHECK(measurement_distance(a, b) == 0.0);
    CHECK(measurement_distance(a, c) > 1e-6);
    CHECK(measurement_distance(a, c) == measurement_distance(c, a));
  }

  TEST_CASE("maps comparison") {
    const Setup s;
    const std::vector<SourceTerm> sources{window_source(s, 50.0), window_source(s, -20.0)};
    const auto riesz = MultiplierSpec::riesz(s.lattice);
    const auto pert = MultiplierSpec::perturbed(s.lattice);
    const auto same = maps_equal(riesz, riesz, sources, s.window, alpha, s.grid, 1e-6);
    CHECK(same.equal);
    CHECK(same.max_deviation == 0.0);
    const auto distinct = maps_equal(riesz, pert, sources, s.window, alpha, s.grid, 1e-6);
    CHECK_FALSE(distinct.equal);
    CHECK(distinct.max_deviation > 1e-6);
    CHECK(maps_equal(riesz, pert, sources, s.window, alpha, s.grid,
                     std::numeric_limits<double>::infinity())
              .equal);
  }
}

TEST_SUITE("static pairing") {
  TEST_CASE("velocity form matches direct Fourier sums") {
    const FourierLattice lat(16);
    std::mt19937_64 rng(7);
    const auto phi1 = scenarios::random_smooth_field(lat, rng, 3);
    const auto phi2 = scenarios::random_smooth_field(lat, rng, 3);
    const auto varphi = scenarios::random_smooth_field(lat, rng, 3);
    const auto diff = difference(MultiplierSpec::riesz(lat), MultiplierSpec::perturbed(lat, 0.5, 0.2));
    const double got = static_pairing(diff, phi1, phi2, varphi);
    const double want = pairing_oracle(diff, phi1, phi2, varphi);
    CHECK(std::abs(want) > 1e-3);
    CHECK(got == doctest::Approx(want).epsilon(1e-11));
  }

  TEST_CASE("identical specs give zero") {
    const FourierLattice lat(32);
    std::mt19937_64 rng(9);
    const auto spec = MultiplierSpec::perturbed(lat);
    const auto a = scenarios::random_smooth_field(lat, rng);
    const auto b = scenarios::random_smooth_field(lat, rng);
    const auto c = scenarios::random_smooth_field(lat, rng);
    CHECK(static_pairing(spec, spec, a, b, c) == 0.0);
    CHECK(static_pairing_perp_form(spec, spec, a, b, c) == 0.0);
  }

  TEST_CASE("symmetry in the probes, antisymmetry in the specs, linearity") {
    const FourierLattice lat(32);
    std::mt19937_64 rng(13);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const auto a = scenarios::random_smooth_field(lat, rng);
    const auto b = scenarios::random_smooth_field(lat, rng);
    const auto c = scenarios::random_smooth_field(lat, rng);
    const double ab = static_pairing(r, p, a, b, c);
    CHECK(std::abs(ab) > 1e-6);
    CHECK(static_pairing(r, p, b, a, c) == doctest::Approx(ab).epsilon(1e-12));
    CHECK(static_pairing(p, r, a, b, c) == doctest::Approx(-ab).epsilon(1e-12));
    CHECK(static_pairing(r, p, 2.0 * a, b, c) == doctest::Approx(2.0 * ab).epsilon(1e-12));
    CHECK(static_pairing(r, p, a, b, 3.0 * c) == doctest::Approx(3.0 * ab).epsilon(1e-12));
  }

  TEST_CASE("perpendicular-gradient form agrees with the velocity form") {
    const FourierLattice lat(64);
    const Window w({0.0, 0.0}, 0.1);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 5; ++i) {
      const auto a = radial_bump(lat, {-0.04, 0.02}, 0.04);
      const auto b = scenarios::random_smooth_field(lat, rng) * (1.0 + i);
      const auto c = exterior_field(lat, {0.3, 0.1 * i - 0.2}, 0.12);
      const double v = static_pairing(r, p, a, b, c);
      const double q = static_pairing_perp_form(r, p, a, b, c);
      CHECK(std::abs(v - q) <= 1e-10 * std::max(1.0, std::abs(v)));
    }
  }

  TEST_CASE("pairing against a constant test function vanishes") {
    const FourierLattice lat(32);
    std::mt19937_64 rng(31);
    const auto a = scenarios::random_smooth_field(lat, rng);
    const auto b = scenarios::random_smooth_field(lat, rng);
    const auto one = sample_spectral(lat, [](double, double) { return 1.0; });
    CHECK(static_pairing(MultiplierSpec::riesz(lat), MultiplierSpec::perturbed(lat), a, b, one) ==
          0.0);
  }
}

TEST_SUITE("integral identity") {
  TEST_CASE("identical specs give a zero residual") {
    const IdentitySetup s;
    const auto [f1, f2] = scenarios::identity_sources(s.lattice, s.window);
    const auto varphi = scenarios::identity_test_function(s.lattice, s.window);
    const auto spec = MultiplierSpec::riesz(s.lattice);
    CHECK(second_order_identity_residual(spec, spec, f1, f2, varphi, s.window, alpha, s.grid) ==
          0.0);
  }

  TEST_CASE("residual agrees with the second linearization evaluation") {
    const IdentitySetup s;
    const auto [f1, f2] = scenarios::identity_sources(s.lattice, s.window);
    const auto varphi = scenarios::identity_test_function(s.lattice, s.window);
    const auto r = MultiplierSpec::riesz(s.lattice);
    const auto p = MultiplierSpec::perturbed(s.lattice);
    const double direct =
        second_order_identity_residual(r, p, f1, f2, varphi, s.window, alpha, s.grid);
    const double via_v = second_order_identity_via_v(r, p, f1, f2, varphi, alpha, s.grid);
    CHECK(std::abs(direct) > 1e-8);
    CHECK(via_v == doctest::Approx(direct).epsilon(2e-3));
  }

  TEST_CASE("residual is bilinear in the sources") {
    const IdentitySetup s;
    const auto [f1, f2] = scenarios::identity_sources(s.lattice, s.window);
    const auto varphi = scenarios::identity_test_function(s.lattice, s.window);
    const auto r = MultiplierSpec::riesz(s.lattice);
    const auto p = MultiplierSpec::perturbed(s.lattice);
    const double base = second_order_identity_residual(r, p, f1, f2, varphi, s.window, alpha, s.grid);
    const double twice =
        second_order_identity_residual(r, p, f1.scaled(2.0), f2, varphi, s.window, alpha, s.grid);
    CHECK(twice == doctest::Approx(2.0 * base).epsilon(1e-12));
    const double swapped =
        second_order_identity_residual(r, p, f2, f1, varphi, s.window, alpha, s.grid);
    CHECK(swapped == doctest::Approx(base).epsilon(1e-12));
  }

  TEST_CASE("test functions touching the window are rejected") {
    const IdentitySetup s;
    const auto [f1, f2] = scenarios::identity_sources(s.lattice, s.window);
    const auto inside = exterior_field(s.lattice, {0.0, 0.0}, 0.15);
    const auto r = MultiplierSpec::riesz(s.lattice);
    CHECK_THROWS_AS(
        second_order_identity_residual(r, r, f1, f2, inside, s.window, alpha, s.grid), Error);
  }
}

TEST_SUITE("kernel reconstruction") {
  const ProbeGeometry wide{Window({0.0, 0.0}, 0.1), 0.45, 1.5};

  TEST_CASE("probe pair construction") {
    const FourierLattice lat(64);
    const auto p = make_probe_pair(lat, {0.3, 0.0}, {0.0, 0.3}, 0.05);
    CHECK(p.phi1.mean().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.phi2.mean().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_probe_pair(lat, {0.3, 0.0}, {0.35, 0.0}, 0.05), Error);
    CHECK_THROWS_AS(radial_bump(lat, {0.0, 0.0}, 0.3), Error);
    CHECK_THROWS_AS(radial_bump(lat, {0.0, 0.0}, 0.0), Error);
  }

  TEST_CASE("radial bump matches the sampled oracle") {
    const FourierLattice lat(32);
    const auto b = to_physical(radial_bump(lat, {0.1, -0.2}, 0.15));
    const auto o = oracle::unit_bump(32, {0.1, -0.2}, 0.15);
    for (std::size_t i = 0; i < o.values.size(); ++i) {
      CHECK(b.values[i] == doctest::Approx(o.values[i]).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("coordinate probe equals the coordinate on the bump support") {
    const FourierLattice lat(64);
    const auto phi1 = radial_bump(lat, {0.0, 0.28125}, 0.1);
    for (int axis : {1, 2}) {
      const auto c = make_coordinate_probe(lat, {0.0, 0.28125}, 0.1, 0.15, axis, 0.45);
      CHECK(coordinate_probe_defect(c, phi1) < 1e-10);
    }
    CHECK_THROWS_AS(make_coordinate_probe(lat, {0.0, 0.3}, 0.1, 0.15, 1, 0.35), Error);
    CHECK_THROWS_AS(make_coordinate_probe(lat, {0.0, 0.0}, 0.1, 0.05, 1), Error);
    CHECK_THROWS_AS(make_coordinate_probe(lat, {0.0, 0.0}, 0.1, 0.15, 3), Error);
  }

  TEST_CASE("smooth cutoff") {
    CHECK(smooth_cutoff(0.0) == 1.0);
    CHECK(smooth_cutoff(1.0) == 0.0);
    CHECK(smooth_cutoff(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smooth_cutoff(0.3) + smooth_cutoff(0.7) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("sampled kernel gradient matches the mollified Fourier sum") {
    const FourierLattice lat(64);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const auto diff = difference(r, p);
    const double width = 0.1;
    const auto place = place_offset({0.3, 0.0}, width, lat.n(), wide);
    REQUIRE(place.has_value());
    const auto probe = make_probe_pair(lat, place->center1, place->center2, width);
    for (int j : {1, 2}) {
      const auto coord = make_coordinate_probe(lat, place->center1, width, 1.5 * width, 3 - j, 0.45);
      const double got = kernel_gradient_sample(r, p, probe, j, coord);
      const double want = oracle::mollified_kernel_gradient(
          [&](int k1, int k2) { return diff(k1, k2); }, lat.n(), place->center1, place->center2,
          width, j, 60);
      CHECK(std::abs(got - want) <= 1e-4 * std::max(std::abs(want), 1e-3));
    }
  }

  TEST_CASE("truth and point values match the oracle sums") {
    const FourierLattice lat(32);
    const auto diff = difference(MultiplierSpec::riesz(lat), MultiplierSpec::perturbed(lat));
    auto m = [&](int k1, int k2) { return diff(k1, k2); };
    const std::array<double, 2> c1{0.0, 0.28125}, c2{-0.3, 0.28125};
    for (int j : {1, 2}) {
      const double truth = kernel_gradient_truth(diff, lat.n(), c1, c2, 0.1, j);
      const double want = oracle::mollified_kernel_gradient(m, 2 * lat.n(), c1, c2, 0.1, j, 60);
      CHECK(truth == doctest::Approx(want).epsilon(1e-12).scale(1.0));
      const double point = kernel_gradient_point(diff, lat.n(), {0.3, 0.05}, j);
      CHECK(point == doctest::Approx(oracle::kernel_gradient_at(m, {0.3, 0.05}, j, 60))
                         .epsilon(1e-12)
                         .scale(1.0));
    }
  }

  TEST_CASE("identical specs give a zero sample") {
    const FourierLattice lat(64);
    const auto r = MultiplierSpec::riesz(lat);
    const auto place = place_offset({0.3, 0.0}, 0.1, lat.n(), wide);
    REQUIRE(place.has_value());
    const auto probe = make_probe_pair(lat, place->center1, place->center2, 0.1);
    const auto coord = make_coordinate_probe(lat, place->center1, 0.1, 0.15, 2, 0.45);
    CHECK(kernel_gradient_sample(r, r, probe, 1, coord) == 0.0);
  }

  TEST_CASE("sample geometry errors") {
    const FourierLattice lat(64);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const auto probe = make_probe_pair(lat, {0.0, 0.28125}, {-0.3, 0.28125}, 0.1);
    const auto coord2 = make_coordinate_probe(lat, {0.0, 0.28125}, 0.1, 0.15, 2, 0.45);
    CHECK_THROWS_AS(kernel_gradient_sample(r, p, probe, 2, coord2), Error);
    CHECK_THROWS_AS(kernel_gradient_sample(r, p, probe, 3, coord2), Error);
    const auto narrow = make_coordinate_probe(lat, {0.0, 0.28125}, 0.05, 0.15, 2, 0.45);
    CHECK_THROWS_AS(kernel_gradient_sample(r, p, probe, 1, narrow), Error);
    const auto close = make_probe_pair(lat, {0.0, 0.28125}, {-0.22, 0.28125}, 0.1);
    CHECK_THROWS_AS(kernel_gradient_sample(r, p, close, 1, coord2), Error);
  }

  TEST_CASE("samples are invariant under grid translations") {
    const FourierLattice lat(64);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const double h = 1.0 / lat.n();
    const std::array<double, 2> c1{0.0, 0.28125};
    double base = 0.0;
    for (int shift = 0; shift <= 2; ++shift) {
      const std::array<double, 2> a{c1[0] + shift * h, c1[1] - shift * h};
      const std::array<double, 2> b{a[0] - 0.3, a[1]};
      const auto probe = make_probe_pair(lat, a, b, 0.1);
      const auto coord = make_coordinate_probe(lat, a, 0.1, 0.15, 2, 0.45);
      const double v = kernel_gradient_sample(r, p, probe, 1, coord);
      if (shift == 0) {
        base = v;
        CHECK(std::abs(base) > 1e-3);
      } else {
        CHECK(std::abs(v - base) <= 1e-8 * std::abs(base));
      }
    }
  }

  TEST_CASE("offset placement respects the geometry") {
    const ProbeGeometry def;
    for (const auto& o : polar_offsets(0.2, 0.4, 3, 8)) {
      const auto pl = place_offset(o, 0.05, 128, def);
      REQUIRE(pl.has_value());
      CHECK(def.observation.avoids_disk(pl->center1, 1.5 * 0.05));
      CHECK(def.observation.avoids_disk(pl->center2, 0.05));
      CHECK(std::hypot(pl->center1[0], pl->center1[1]) + 0.075 <= 0.35 + 1e-12);
      double d1 = pl->center1[0] - pl->center2[0] - o[0];
      double d2 = pl->center1[1] - pl->center2[1] - o[1];
      d1 -= std::round(d1);
      d2 -= std::round(d2);
      CHECK(std::hypot(d1, d2) < 1e-12);
    }
    CHECK_FALSE(place_offset({0.1, 0.0}, 0.05, 128, def).has_value());
    CHECK_FALSE(place_offset({0.3, 0.0}, 0.1, 64, def).has_value());
  }

  TEST_CASE("reconstruction table") {
    const FourierLattice lat(64);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const auto offsets = polar_offsets(0.3, 0.4, 2, 4);
    const auto same = reconstruct_kernel_gradient(r, r, offsets, 0.1, lat, wide);
    CHECK(same.rows.size() == 2 * offsets.size());
    CHECK(same.relative_l2_error == 0.0);
    const auto t = reconstruct_kernel_gradient(r, p, offsets, 0.1, lat, wide);
    CHECK(t.relative_l2_error < 1e-3);
    CHECK(t.mollification_error < 0.5);
    for (const auto& row : t.rows) CHECK(row.abs_error == std::abs(row.sampled - row.truth));
    CHECK_THROWS_AS(reconstruct_kernel_gradient(r, p, {{0.05, 0.0}}, 0.1, lat, wide), Error);
  }

  TEST_CASE("narrower bumps approach the point values") {
    const FourierLattice lat(128);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const auto offsets = polar_offsets(0.3, 0.4, 2, 4);
    const auto coarse = reconstruct_kernel_gradient(r, p, offsets, 0.1, lat, wide);
    const auto fine = reconstruct_kernel_gradient(r, p, offsets, 0.05, lat, wide);
    CHECK(fine.sampled_vs_point_error < coarse.sampled_vs_point_error);
  }

  TEST_CASE("polar offsets") {
    const auto o = polar_offsets(0.2, 0.4, 3, 4);
    REQUIRE(o.size() == 12);
    CHECK(o[0][0] == doctest::Approx(0.2));
    CHECK(o[2][0] == doctest::Approx(0.4));
    CHECK(o[3][1] == doctest::Approx(0.2));
    CHECK(std::abs(o[3][0]) < 1e-15);
    CHECK(polar_offsets(0.25, 0.4, 1, 2).front()[0] == doctest::Approx(0.25));
  }

  TEST_CASE("exterior velocity gap") {
    const FourierLattice lat(32);
    const Window w({0.0, 0.0}, 0.1);
    const auto r = MultiplierSpec::riesz(lat);
    const auto p = MultiplierSpec::perturbed(lat);
    const auto g = radial_bump(lat, {0.0, 0.0}, 0.05);
    CHECK(exterior_velocity_gap(r, r, {g}, w) == 0.0);
    const double gap = exterior_velocity_gap(r, p, {g}, w);
    CHECK(gap > 0.0);
    const auto u = velocity(g, difference(r, p));
    const auto a = to_physical(u.u1);
    const auto b = to_physical(u.u2);
    const auto ext = w.exterior_mask(32);
    double want = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (ext.values[i] > 0.0) want = std::max({want, std::abs(a.values[i]), std::abs(b.values[i])});
    }
    CHECK(gap == want);
  }
}
