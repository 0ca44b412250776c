#include "asq/multiplier.hpp"

#include "asq/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace asq {

Symbol operator-(const Symbol& a, const Symbol& b) {
  return Symbol([a, b](int k1, int k2) { return a(k1, k2) - b(k1, k2); });
}

Symbol operator+(const Symbol& a, const Symbol& b) {
  return Symbol([a, b](int k1, int k2) { return a(k1, k2) + b(k1, k2); });
}

MultiplierSpec::MultiplierSpec(std::string name, Symbol symbol, double c_lower, double c_upper,
                               const FourierLattice& lattice,
                               std::map<std::string, double> parameters)
    : name_(std::move(name)),
      symbol_(std::move(symbol)),
      c_lower_(c_lower),
      c_upper_(c_upper),
      validated_n_(lattice.n()),
      parameters_(std::move(parameters)) {
  if (!(c_lower_ > 0.0) || !(c_upper_ >= c_lower_)) {
    throw Error(fmt::format("MultiplierSpec {}: need 0 < c <= C, got c={} C={}", name_, c_lower_,
                            c_upper_));
  }
  const int n = lattice.n();
  for (int k2 = -n / 2; k2 < n / 2; ++k2) {
    for (int k1 = -n / 2; k1 < n / 2; ++k1) {
      if (k1 == 0 && k2 == 0) continue;
      const double m = symbol_(k1, k2);
      const double kinv = 1.0 / std::hypot(double(k1), double(k2));
      // relative slack of a few ulps
      const double slack = 4e-15 * c_upper_ * kinv;
      if (!(m >= c_lower_ * kinv - slack) || !(m <= c_upper_ * kinv + slack)) {
        throw Error(fmt::format("MultiplierSpec {}: bound c|k|^-1 <= m(k) <= C|k|^-1 violated at "
                                "k=({},{}): m={}",
                                name_, k1, k2, m));
      }
      if (k1 > -n / 2 && k2 > -n / 2 && symbol_(-k1, -k2) != m) {
        throw Error(fmt::format("MultiplierSpec {}: symbol not even at k=({},{})", name_, k1, k2));
      }
    }
  }
}

MultiplierSpec MultiplierSpec::riesz(const FourierLattice& lattice) {
  return MultiplierSpec(
      "riesz", Symbol([](int k1, int k2) { return 1.0 / std::hypot(double(k1), double(k2)); }),
      1.0, 1.0, lattice);
}

MultiplierSpec MultiplierSpec::perturbed(const FourierLattice& lattice, double amplitude,
                                         double decay) {
  if (!(amplitude > -0.5 && amplitude <= 0.5) || !(decay > 0.0)) {
    throw Error(fmt::format("perturbed multiplier: amplitude must lie in (-1/2, 1/2] and decay "
                            "> 0, got {} / {}",
                            amplitude, decay));
  }
  Symbol s([amplitude, decay](int k1, int k2) {
    const double k2sum = double(k1) * k1 + double(k2) * k2;
    return (1.0 + amplitude * std::exp(-decay * k2sum)) / std::sqrt(k2sum);
  });
  return MultiplierSpec("perturbed", std::move(s), 0.5, 1.5, lattice,
                        {{"amplitude", amplitude}, {"decay", decay}});
}

MultiplierSpec MultiplierSpec::radial_table(const FourierLattice& lattice,
                                            std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw Error("radial_table: no knots");
  std::sort(knots.begin(), knots.end());
  double lo = knots.front().second;
  double hi = lo;
  for (const auto& [k, g] : knots) {
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  auto table = std::make_shared<std::vector<std::pair<double, double>>>(std::move(knots));
  Symbol s([table](int k1, int k2) {
    const double r = std::hypot(double(k1), double(k2));
    const auto& t = *table;
    double g = t.back().second;
    if (r <= t.front().first) {
      g = t.front().second;
    } else if (r < t.back().first) {
      auto it = std::upper_bound(t.begin(), t.end(), std::make_pair(r, -1e300));
      const auto& [r1, g1] = *it;
      const auto& [r0, g0] = *(it - 1);
      g = g0 + (g1 - g0) * (r - r0) / (r1 - r0);
    }
    return g / r;
  });
  std::map<std::string, double> params;
  for (std::size_t i = 0; i < table->size(); ++i) {
    params[fmt::format("knot{}_k", i)] = (*table)[i].first;
    params[fmt::format("knot{}_g", i)] = (*table)[i].second;
  }
  return MultiplierSpec("table", std::move(s), lo, hi, lattice, std::move(params));
}

} // namespace asq
