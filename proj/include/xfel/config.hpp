#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xfel/dynamics.hpp"
#include "xfel/functionals.hpp"
#include "xfel/grid.hpp"
#include "xfel/ground_states.hpp"

namespace xfel {

enum class SeedKind { gaussian, lifted_R, snapshot_file };

struct SeedSpec {
  SeedKind kind = SeedKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;     // gaussian
  double stretch = 1.0;   // lifted_R: amplitude * R(stretch |x|)
  std::filesystem::path path;  // snapshot_file
  std::optional<double> mass;  // rescale to this mass after construction
  double noise = 0.0;     // relative amplitude of a seeded smooth random perturbation
};

struct ExperimentSpec {
  std::optional<std::string> name;
  std::string problem;                 // ground-state / scan: d_omega | gamma_c | m_c | d_K | local_min
  std::optional<double> c;
  std::optional<double> r_ball;
  std::vector<double> c_values;
  std::vector<double> lambdas;
  double cutoff_radius = 3.0;
  std::optional<double> mass_lo, mass_hi;
  double rel_tol = 0.02;
  double threshold_tol = 0.05;         // allowed |threshold / predicted - 1|
  double dr = 0.005;
  double r_max = 30.0;
  std::string data = "seed";           // classify: seed | ground_state
  std::string scale_kind = "amplitude";  // amplitude | mass_preserving
  double scale_factor = 1.0;
  bool evolve_data = false;
};

struct RunConfig {
  GridSpec grid = GridSpec::make(64, 6.0);
  PhysicsParams physics;
  SolveConfig solver;
  EvolveConfig evolve;
  ExperimentSpec experiment;
  SeedSpec seed;
  std::filesystem::path output_dir = "run";
  std::uint64_t rng_seed = 0;
};

// INI-style: [section] headers, key = value lines, '#' or ';' comments.
// Unknown sections/keys, duplicates and out-of-range values throw ConfigError.
// Relative snapshot paths are resolved against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Builds the initial field described by cfg.seed on cfg.grid.
Field make_seed(const RunConfig& cfg);

}  // namespace xfel
