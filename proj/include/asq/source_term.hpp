#pragma once

#include "asq/spectral_field.hpp"
#include "asq/window.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace asq {

/// Uniform time grid on [0, T] with M steps; node m is m * dt.
class TimeGrid {
public:
  TimeGrid(double final_time, int steps);

  double final_time() const noexcept { return final_time_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }
  double node(int m) const noexcept { return m * dt_; }
  /// Trapezoid weight of node m.
  double weight(int m) const noexcept { return (m == 0 || m == steps_) ? 0.5 * dt_ : dt_; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
    return a.final_time_ == b.final_time_ && a.steps_ == b.steps_;
  }

private:
  double final_time_;
  int steps_;
  double dt_;
};

/// Smooth compactly supported bump exp(-1/(1 - tau^2)) in
/// tau = (2t - t_a - t_b) / (t_b - t_a), zero outside (t_a, t_b).
double temporal_bump(double t, double t_a, double t_b);

/// Space-time source f(x, t), evaluated at time nodes. Temporal support is
/// [t_a, t_b]; the optional spatial support is the window it was built for.
class SourceTerm {
public:
  using Evaluator = std::function<SpectralField(double)>;

  SourceTerm(FourierLattice lattice, Evaluator evaluator,
             double t_a = -std::numeric_limits<double>::infinity(),
             double t_b = std::numeric_limits<double>::infinity(),
             std::optional<Window> spatial_support = std::nullopt);

  static SourceTerm zero(const FourierLattice& lattice);
  /// f(x, t) = profile(x), for all t.
  static SourceTerm steady(SpectralField profile);
  /// f(x, t) = profile(x) * temporal_bump(t, t_a, t_b).
  static SourceTerm bump(SpectralField profile, double t_a, double t_b,
                         std::optional<Window> spatial_support = std::nullopt);
  /// f(x, t) = profile(x) * shape(t).
  static SourceTerm separable(SpectralField profile, std::function<double(double)> shape,
                              double t_a = -std::numeric_limits<double>::infinity(),
                              double t_b = std::numeric_limits<double>::infinity());
  /// Node values of a discrete source on `grid`; evaluation off the nodes
  /// throws.
  static SourceTerm sampled(const TimeGrid& grid, std::vector<SpectralField> nodes,
                            std::optional<Window> spatial_support = std::nullopt);

  SpectralField operator()(double t) const;
  const FourierLattice& lattice() const noexcept { return lattice_; }
  double t_a() const noexcept { return t_a_; }
  double t_b() const noexcept { return t_b_; }
  const std::optional<Window>& spatial_support() const noexcept { return support_; }

  /// a * this + b * other (supports merged to the hull).
  SourceTerm combine(double a, const SourceTerm& other, double b) const;
  SourceTerm scaled(double a) const;
  /// Time-reversed source s -> f(T - s).
  SourceTerm reversed(double final_time) const;

  /// Node values on a grid.
  std::vector<SpectralField> nodes(const TimeGrid& grid) const;

private:
  FourierLattice lattice_;
  Evaluator evaluator_;
  double t_a_;
  double t_b_;
  std::optional<Window> support_;
};

SourceTerm operator+(const SourceTerm& a, const SourceTerm& b);

} // namespace asq
