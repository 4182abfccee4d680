#pragma once

#include "ttplan/dynamics.hpp"
#include "ttplan/geometry.hpp"
#include "ttplan/rally_simulator.hpp"
#include "ttplan/state_estimator.hpp"
#include "ttplan/strike_planner.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ttplan {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  /// Trials per grid cell.
  std::size_t trials = 20;
  /// Trajectories produced by `gen`.
  std::size_t count = 15;
  /// Measurement noise sigma [m].
  double noise = 0.001;
  /// Worker threads for Monte Carlo work; 0 uses every hardware thread.
  std::size_t threads = 1;
  std::size_t max_shots = 200;
  LaunchSpec launch{};
};

/// Every tunable of a run. File format: one `section.key = value` per line,
/// `#` starts a comment, vectors are comma separated, the reach curve is a
/// list of `distance:time` pairs.
struct RunConfig {
  TableGeometry geometry{};
  PhysicsParams physics{0.1, 0.75, 0.9, 0.8};
  EstimatorConfig estimator{};
  ExecutorConfig executor{};
  PlannerConfig planner{};
  double lock_time = 0.5;
  BasePose home{};
  IntegratorOptions integrator{};
  ExperimentConfig experiment{};

  /// Throws InvariantViolation on the first out-of-range value.
  void validate() const;

  /// Sets one key from its textual value. Throws InvalidArgument for
  /// unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);

  /// All keys with their values, sorted by key, one `key = value` per line.
  std::string canonical() const;
  /// FNV-1a 64 of canonical() without the seed, which is reported apart.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  SimulationConfig simulation() const;
  /// Side whose model equals the simulated world, with the configured
  /// measurement noise.
  SideConfig side() const;
};

/// Every key accepted by RunConfig::set.
std::vector<std::string> config_keys();

/// Parses a config file on top of the defaults. ParseError names the line.
RunConfig read_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ttplan
