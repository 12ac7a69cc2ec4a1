#include "ltisid/density.hpp"

#include <cmath>
#include <stdexcept>

namespace ltisid {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

// Log-density of N(mean, cov) with a precomputed Cholesky factor.
double log_density_llt(const Eigen::VectorXd& residual, const Eigen::LLT<Eigen::MatrixXd>& llt,
                       double log_det) {
  const Eigen::VectorXd w = llt.matrixL().solve(residual);
  return -0.5 * (w.squaredNorm() + log_det + kLog2Pi * static_cast<double>(residual.size()));
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  double log_det = 0.0;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += 2.0 * std::log(L(i, i));
  return log_det;
}

}  // namespace

double gaussian_log_density(const Eigen::VectorXd& point, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov) {
  if (point.size() != mean.size() || cov.rows() != point.size() || cov.cols() != point.size()) {
    throw std::invalid_argument("gaussian_log_density: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gaussian_log_density: covariance is not positive definite");
  }
  return log_density_llt(point - mean, llt, log_det_from_llt(llt));
}

double trajectory_log_density(const StateSpace& sys, const Trajectory& traj,
                              const EnvironmentSpec& env, double process_noise_var,
                              double obs_noise_var) {
  check_consistent(sys);
  const int d_x = sys.state_dim();
  const int d_y = sys.output_dim();
  const int T = traj.steps();
  if (T < 1) throw std::invalid_argument("trajectory has no steps");
  if (traj.x.rows() != T + 1 || traj.x.cols() != d_x) {
    throw std::invalid_argument("trajectory state sequence is missing or inconsistent");
  }
  if (traj.y.rows() != T + 1 || traj.y.cols() != d_y) {
    throw std::invalid_argument("trajectory output sequence is inconsistent");
  }
  if (env.control_dim() != sys.control_dim()) {
    throw std::invalid_argument("environment control dimension does not match the system");
  }
  if (!(obs_noise_var > 0.0)) {
    throw std::invalid_argument("observation noise variance must be positive");
  }
  if (!(process_noise_var >= 0.0)) {
    throw std::invalid_argument("process noise variance must be nonnegative");
  }

  // State conditional covariance B Sigma_u B^T + q I; must be nonsingular
  // for the chain factorization to have a density.
  Eigen::MatrixXd state_cov = sys.B * env.variances.asDiagonal() * sys.B.transpose();
  state_cov.diagonal().array() += process_noise_var;
  Eigen::LLT<Eigen::MatrixXd> state_llt(state_cov);
  if (state_llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "trajectory_log_density: singular state conditional covariance (B Sigma B^T + q I)");
  }
  const double state_log_det = log_det_from_llt(state_llt);
  const Eigen::VectorXd drift = sys.B * env.mean;

  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd predicted = sys.A * traj.x.row(t).transpose() + drift;
    total += log_density_llt(traj.x.row(t + 1).transpose() - predicted, state_llt, state_log_det);
  }
  // Observation terms for t = 1..T; y_0 is determined by the conditioning
  // state x_0 and is not scored.
  const double obs_log_det = static_cast<double>(d_y) * std::log(obs_noise_var);
  for (int t = 1; t <= T; ++t) {
    const Eigen::VectorXd residual =
        traj.y.row(t).transpose() - sys.C * traj.x.row(t).transpose();
    total += -0.5 * (residual.squaredNorm() / obs_noise_var + obs_log_det +
                     kLog2Pi * static_cast<double>(d_y));
  }
  return total;
}

}  // namespace ltisid
