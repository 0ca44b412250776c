#pragma once

#include "asq/lattice.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace asq {

/// Real, even Fourier symbol k -> m(k) on Z^2 with m(0) = 0. Symbols are
/// values, so differences of multipliers (which need not satisfy any lower
/// bound) are expressible as symbols too.
class Symbol {
public:
  using Fn = std::function<double(int, int)>;

  Symbol() = default;
  explicit Symbol(Fn fn) : fn_(std::make_shared<Fn>(std::move(fn))) {}

  double operator()(int k1, int k2) const {
    if (k1 == 0 && k2 == 0) return 0.0;
    return fn_ ? (*fn_)(k1, k2) : 0.0;
  }

  static Symbol zero() { return Symbol(); }

  friend Symbol operator-(const Symbol& a, const Symbol& b);
  friend Symbol operator+(const Symbol& a, const Symbol& b);

private:
  std::shared_ptr<const Fn> fn_;
};

/// Symbol of an order -1 multiplier K together with the constants of the
/// two-sided bound c |k|^-1 <= m(k) <= C |k|^-1. Construction verifies the
/// bound and evenness on every nonzero wavevector of the given lattice.
class MultiplierSpec {
public:
  MultiplierSpec(std::string name, Symbol symbol, double c_lower, double c_upper,
                 const FourierLattice& lattice,
                 std::map<std::string, double> parameters = {});

  /// m(k) = |k|^-1 (periodic Riesz potential).
  static MultiplierSpec riesz(const FourierLattice& lattice);
  /// m(k) = |k|^-1 (1 + amplitude exp(-decay |k|^2)); amplitude in (-1/2, 1/2].
  static MultiplierSpec perturbed(const FourierLattice& lattice, double amplitude = 0.5,
                                  double decay = 1.0);
  /// Radial table m(k) = |k|^-1 g(|k|), g linearly interpolated in |k| from
  /// (magnitude, factor) knots and held constant beyond the last knot.
  static MultiplierSpec radial_table(const FourierLattice& lattice,
                                     std::vector<std::pair<double, double>> knots);

  const std::string& name() const noexcept { return name_; }
  const Symbol& symbol() const noexcept { return symbol_; }
  double operator()(int k1, int k2) const { return symbol_(k1, k2); }
  double c_lower() const noexcept { return c_lower_; }
  double c_upper() const noexcept { return c_upper_; }
  int validated_n() const noexcept { return validated_n_; }
  const std::map<std::string, double>& parameters() const noexcept { return parameters_; }

  /// True when the symbol was validated on a lattice at least as large.
  bool compatible(const FourierLattice& lattice) const noexcept {
    return lattice.n() <= validated_n_;
  }

private:
  std::string name_;
  Symbol symbol_;
  double c_lower_;
  double c_upper_;
  int validated_n_;
  std::map<std::string, double> parameters_;
};

inline Symbol difference(const MultiplierSpec& a, const MultiplierSpec& b) {
  return a.symbol() - b.symbol();
}

} // namespace asq
