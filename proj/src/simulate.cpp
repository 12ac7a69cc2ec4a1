#include "ltisid/simulate.hpp"

#include <stdexcept>

#include "ltisid/rng.hpp"

namespace ltisid {

Trajectory simulate(const StateSpace& sys, const EnvironmentSpec& env, int T,
                    double obs_noise_var, const Eigen::VectorXd& x0, std::uint64_t seed) {
  check_consistent(sys);
  if (T < 1) throw std::invalid_argument("horizon must be >= 1");
  if (env.control_dim() != sys.control_dim()) {
    throw std::invalid_argument("environment control dimension does not match the system");
  }
  if (x0.size() != sys.state_dim()) throw std::invalid_argument("x0 has the wrong dimension");
  if (!(obs_noise_var >= 0.0)) throw std::invalid_argument("observation noise variance must be >= 0");

  const int d_u = sys.control_dim();
  const int d_y = sys.output_dim();
  const Eigen::VectorXd stddev = env.variances.cwiseSqrt();
  const double noise_std = std::sqrt(obs_noise_var);

  Trajectory traj;
  traj.env_index = env.index;
  traj.seed = seed;
  traj.u.resize(T, d_u);
  traj.x.resize(T + 1, sys.state_dim());
  traj.y.resize(T + 1, d_y);

  // Controls and observation noise come from independent streams so the
  // same seed produces identical controls at every noise level.
  Rng control_rng(derive_seed(seed, 0));
  Rng noise_rng(derive_seed(seed, 1));
  Eigen::VectorXd state = x0;
  traj.x.row(0) = state;
  for (int t = 0; t <= T; ++t) {
    if (t > 0) {
      Eigen::VectorXd u(d_u);
      for (int i = 0; i < d_u; ++i) u(i) = env.mean(i) + stddev(i) * control_rng.gaussian();
      traj.u.row(t - 1) = u;
      state = sys.A * state + sys.B * u;
      traj.x.row(t) = state;
    }
    Eigen::VectorXd y = sys.C * state;
    if (obs_noise_var > 0.0) {
      for (int i = 0; i < d_y; ++i) y(i) += noise_std * noise_rng.gaussian();
    }
    traj.y.row(t) = y;
  }
  return traj;
}

Trajectory simulate(const StateSpace& sys, const EnvironmentSpec& env, int T,
                    double obs_noise_var, std::uint64_t seed) {
  return simulate(sys, env, T, obs_noise_var, Eigen::VectorXd::Zero(sys.state_dim()), seed);
}

}  // namespace ltisid
