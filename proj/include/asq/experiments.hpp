#pragma once

#include "asq/config.hpp"
#include "asq/evolution.hpp"
#include "asq/window.hpp"

#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace asq {

/// Sources, targets and random fields shared by the experiments and the
/// acceptance suite.
namespace scenarios {

/// Three smooth sources supported in W x (0, 0.35]: the window mask times
/// 1, (x1 - c1)/r and (x2 - c2)/r, each with a temporal bump.
std::vector<SourceTerm> source_basket(const FourierLattice& lattice, const Window& window);

/// Pair (f1, f2) supported in W x (0, T) for the integral identity
/// (amplitude 100).
std::pair<SourceTerm, SourceTerm> identity_sources(const FourierLattice& lattice,
                                                   const Window& window);
/// Smooth test function supported in the exterior of W.
SpectralField identity_test_function(const FourierLattice& lattice, const Window& window);

/// amplitude cos(2 pi x1) beta(t; 0.05, 0.45).
SourceTerm x1_only_source(const FourierLattice& lattice, double amplitude = 1.0);
/// (cos(2 pi x1) + 1/2 sin(2 pi (x1 + x2))) beta(t; 0.05, 0.45).
SourceTerm generic_source(const FourierLattice& lattice);
/// cos(2 pi x1) beta and cos(4 pi x2) beta (different lattice shells).
std::pair<SourceTerm, SourceTerm> cross_mode_sources(const FourierLattice& lattice);

/// Admissible control in the range of the adjoint: f* = A^*(chi_e h) with
/// h = chi_e cos(2 pi x1) beta(t; 0.1 T, 0.9 T), A the control-to-state map.
Trajectory planted_control(const FourierLattice& lattice, const Window& window, double alpha,
                           const TimeGrid& grid);
/// chi_e(x) exp(-|x - c|^2 / (2 * 0.4^2)) beta(t; 0, 1.5) on the time grid.
Trajectory generic_control_target(const FourierLattice& lattice, const Window& window,
                                  const TimeGrid& grid);

/// Hermitian field with independent normal coefficients damped by
/// exp(-|k|^2 / kmax^2) for |k1|, |k2| <= kmax.
SpectralField random_smooth_field(const FourierLattice& lattice, std::mt19937_64& rng,
                                  int kmax = 8);

} // namespace scenarios

/// One row of the acceptance table.
struct CriterionResult {
  int id;
  std::string name;
  double value;
  double threshold;
  bool pass;
  std::string detail;
};

inline constexpr const char* subcommands[] = {"forward",  "diffuse",     "linearize", "runge",
                                              "identity", "reconstruct", "report"};

enum ExitStatus : int { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_acceptance = 3 };

/// Runs a subcommand, writing artifacts under config.output_dir/<subcommand>.
/// Errors propagate as exceptions (ConfigError, SolverError, Error); the
/// return value is exit_ok or, for report, exit_acceptance when a criterion
/// fails or a prior run is missing.
int run_subcommand(const std::string& subcommand, const ExperimentConfig& config,
                   std::ostream& log);

/// Maps an exception from run_subcommand to an exit status and prints it.
int exit_status_for(const std::exception& error, std::ostream& err);

} // namespace asq
