#pragma once

#include "asq/evolution.hpp"

#include <map>
#include <string>
#include <vector>

namespace asq {

namespace norm_names {
inline constexpr const char* l2_h2alpha = "L2(0,T;H^2alpha)";
inline constexpr const char* linf_halpha = "Linf(0,T;H^alpha)";
inline constexpr const char* l2_halpha = "L2(0,T;H^alpha)";
inline constexpr const char* c_l2 = "C([0,T];L2)";
} // namespace norm_names

using NamedNorms = std::map<std::string, double>;

/// (int_0^T ||h||_{H^r}^2 dt)^(1/2), trapezoid over nodes.
double time_l2_sobolev(const Trajectory& h, double r);
/// max over nodes of ||h||_{H^r}.
double time_sup_sobolev(const Trajectory& h, double r);

/// Norms of h = theta_{eps f}/eps - w, w the linear response to f:
/// L2(0,T;H^{2 alpha}) and Linf(0,T;H^alpha).
NamedNorms first_linearization_residual(const SourceTerm& f, double eps,
                                        const MultiplierSpec& spec, double alpha,
                                        const TimeGrid& grid);

/// Cross variant h = (theta_{eps(f1+f2)} - theta_{eps f_j})/eps - w_{3-j}.
NamedNorms first_linearization_cross_residual(const SourceTerm& f1, const SourceTerm& f2, int j,
                                              double eps, const MultiplierSpec& spec,
                                              double alpha, const TimeGrid& grid);

/// Solves d_t v + (-Delta)^alpha v = -(R w1 . grad w2 + R w2 . grad w1), v(0) = 0.
Trajectory solve_second_linearization(const Trajectory& w1, const Trajectory& w2,
                                      const MultiplierSpec& spec, double alpha);
Trajectory solve_second_linearization(const Trajectory& w1, const Trajectory& w2,
                                      const Symbol& symbol, double alpha);

/// Norms of h = (theta_{eps(f1+f2)} - theta_{eps f1} - theta_{eps f2})/eps^2 - v:
/// L2(0,T;H^alpha) and C([0,T];L2).
NamedNorms second_linearization_residual(const SourceTerm& f1, const SourceTerm& f2, double eps,
                                         const MultiplierSpec& spec, double alpha,
                                         const TimeGrid& grid);

/// Residuals over a strictly decreasing list of epsilons in (0, 1).
struct EpsSweep {
  std::vector<double> epsilons;
  std::map<std::string, std::vector<double>> residuals;

  void validate() const;
};

inline constexpr double residual_floor = 1e-14;

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_deviation = 0.0;
  int points_used = 0;
  std::vector<std::string> notes;
};

/// Least-squares fit of log(residual) against log(eps) per norm. Residuals
/// below the floor are excluded with a note; fewer than 3 usable points or a
/// negative residual throw.
std::map<std::string, RateFit> convergence_rate_fit(const EpsSweep& sweep);

enum class FirstOrderVariant { direct, cross1, cross2 };

/// Runs first-order residuals for every epsilon (concurrently).
EpsSweep first_order_sweep(const SourceTerm& f1, const SourceTerm& f2, FirstOrderVariant variant,
                           const std::vector<double>& epsilons, const MultiplierSpec& spec,
                           double alpha, const TimeGrid& grid, int threads = 1);

EpsSweep second_order_sweep(const SourceTerm& f1, const SourceTerm& f2,
                            const std::vector<double>& epsilons, const MultiplierSpec& spec,
                            double alpha, const TimeGrid& grid, int threads = 1);

std::vector<double> default_epsilons();

} // namespace asq
