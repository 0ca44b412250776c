#pragma once

#include "asq/multiplier.hpp"
#include "asq/window.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace asq {

/// Multiplier selection: "riesz", "perturbed" (amplitude, decay) or "table"
/// (radial knots).
struct MultiplierConfig {
  std::string kind = "riesz";
  double amplitude = 0.5;
  double decay = 1.0;
  std::vector<std::pair<double, double>> table;

  MultiplierSpec build(const FourierLattice& lattice) const;
};

struct ExperimentConfig {
  int n = 128;
  double alpha = 0.75;
  double s = 1.5;
  double q = 5.0;
  double final_time = 0.5;
  int steps = 500;

  /// Multiplier used by single-spec experiments and as spec1 in comparisons.
  MultiplierConfig multiplier{};
  /// spec2 in the identity and reconstruction experiments.
  MultiplierConfig comparison{"perturbed", 0.5, 1.0, {}};

  double window_x = 0.0;
  double window_y = 0.0;
  double window_radius = 0.1;

  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> lambdas{1e-8, 1e-6};
  int maxiter = 50;

  double probe_width = 0.05;
  double coordinate_radius = 0.35;
  double offset_min = 0.2;
  double offset_max = 0.4;
  int offset_radii = 8;
  int offset_angles = 8;

  std::filesystem::path output_dir = "runs";
  std::uint64_t rng_seed = 42;
  int threads = 1;

  Window window() const { return Window({window_x, window_y}, window_radius); }
  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Parses key = value sections ([grid], [model], [multiplier], [comparison],
/// [window], [linearization], [control], [reconstruction], [run]). Missing
/// keys keep their defaults; unknown sections or keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& config);

} // namespace asq
