#pragma once

#include <cstdint>

#include "ltisid/environments.hpp"
#include "ltisid/state_space.hpp"

namespace ltisid {

// One recorded rollout. Rows index time: u has T rows, x and y have T+1
// (x_0 and y_0 included). Controls are kept for evaluation only; fitting
// code must go through FittingView, which does not expose them.
struct Trajectory {
  int env_index = 0;
  Eigen::MatrixXd u;  // T x d_u
  Eigen::MatrixXd x;  // (T+1) x d_x, empty when loaded from disk
  Eigen::MatrixXd y;  // (T+1) x d_y
  std::uint64_t seed = 0;

  int steps() const { return static_cast<int>(u.rows()); }
};

/// Rolls the system forward T steps from x0 with controls drawn from `env`
/// and isotropic Gaussian observation noise of variance obs_noise_var.
/// Bit-deterministic given the seed.
Trajectory simulate(const StateSpace& sys, const EnvironmentSpec& env, int T,
                    double obs_noise_var, const Eigen::VectorXd& x0, std::uint64_t seed);

/// Same, starting from the zero state.
Trajectory simulate(const StateSpace& sys, const EnvironmentSpec& env, int T,
                    double obs_noise_var, std::uint64_t seed);

}  // namespace ltisid
