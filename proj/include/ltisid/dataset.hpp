#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltisid/simulate.hpp"

namespace ltisid {

/// Multi-environment recordings plus the metadata needed to reproduce them.
struct TrajectorySet {
  std::vector<Trajectory> trajectories;
  std::vector<EnvironmentSpec> specs;
  std::uint64_t system_fingerprint = 0;
  double obs_noise_var = 0.0;
  int horizon = 0;
  std::uint64_t master_seed = 0;
  int schema_version = 1;

  int d_u() const { return specs.empty() ? 0 : specs.front().control_dim(); }
  int d_y() const {
    return trajectories.empty() ? 0 : static_cast<int>(trajectories.front().y.cols());
  }
};

/// Hash over specs, data and metadata; equal sets hash equal.
std::uint64_t fingerprint(const TrajectorySet& data);
std::uint64_t fingerprint(const StateSpace& sys);

// The estimation-facing slice of a TrajectorySet: observations and
// environment covariances only. Ground-truth controls are not reachable
// through it, which is what keeps the fitting path honest.
struct FittingView {
  struct Env {
    const Eigen::MatrixXd* y = nullptr;        // (T+1) x d_y
    const EnvironmentSpec* spec = nullptr;
  };
  std::vector<Env> envs;

  static FittingView of(const TrajectorySet& data);

  int d_y() const { return envs.empty() ? 0 : static_cast<int>(envs.front().y->cols()); }
  int d_u() const { return envs.empty() ? 0 : envs.front().spec->control_dim(); }
  std::size_t pair_count() const;
};

/// One trajectory per environment, steps_per_env steps each, with
/// per-environment seeds derived from `seed`. Rejects unstable systems
/// unless allow_unstable is set. Environments are simulated in parallel;
/// the result does not depend on scheduling.
TrajectorySet generate_dataset(const StateSpace& sys, const std::vector<EnvironmentSpec>& specs,
                               int steps_per_env, double obs_noise_var, std::uint64_t seed,
                               bool allow_unstable = false);

}  // namespace ltisid
