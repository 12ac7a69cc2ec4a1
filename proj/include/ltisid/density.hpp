#pragma once

#include "ltisid/dataset.hpp"

namespace ltisid {

// Exact log-density of a recorded trajectory under the Markov factorization
//   log p(x_1 | x_0) + sum_t log p(x_{t+1} | x_t) + sum_t log p(y_t | x_t)
// with p(x_{t+1} | x_t) = N(A x_t + B mu_u, B Sigma_u B^T + q I) and
// p(y_t | x_t) = N(C x_t, r I). The state sequence must be present. This
// factorized value equals the joint Gaussian log-density of the stacked
// vector (x_1..x_T, y_1..y_T); the equality is checked in tests.
double trajectory_log_density(const StateSpace& sys, const Trajectory& traj,
                              const EnvironmentSpec& env, double process_noise_var,
                              double obs_noise_var);

/// Log-density of N(mean, cov) at point; cov must be positive definite.
double gaussian_log_density(const Eigen::VectorXd& point, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov);

}  // namespace ltisid
