#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ltisid/dataset.hpp"

namespace ltisid {

// Linear decoder u_hat_t = M (y_{t+1}; y_t). M is d_u x 2 d_y, partitioned
// [M1 | M2] with M1 acting on y_{t+1}.
struct LinearDecoder {
  Eigen::MatrixXd M;

  LinearDecoder() = default;
  explicit LinearDecoder(Eigen::MatrixXd M_in) : M(std::move(M_in)) {}

  int control_dim() const { return static_cast<int>(M.rows()); }
  int output_dim() const { return static_cast<int>(M.cols() / 2); }
  Eigen::MatrixXd m1() const { return M.leftCols(output_dim()); }
  Eigen::MatrixXd m2() const { return M.rightCols(output_dim()); }
};

enum class DecoderInit { kOrthogonal, kScaledGaussian };
enum class LossWeighting { kPrecision, kCovariance };

struct FitConfig {
  double learning_rate = 3e-3;
  int batch_size = 64;
  int epochs = 4000;
  double grad_clip_norm = 0.5;
  DecoderInit init = DecoderInit::kOrthogonal;
  std::uint64_t seed = 0;
  // The Gaussian log-density weights the quadratic by the precision
  // (Sigma_u^e)^{-1} and carries a -log|det M1| volume term; without the
  // volume term the zero decoder is a global optimum. kCovariance plus
  // include_log_det = false reproduces the literal weighted-least-squares
  // objective for ablation.
  bool include_log_det = true;
  LossWeighting weighting = LossWeighting::kPrecision;
};

struct FitReport {
  double final_loss = 0.0;           // loss of the returned (best) decoder
  std::vector<double> loss_curve;    // full-data loss after each epoch
  int epochs_run = 0;
  double wall_time_s = 0.0;
};

struct CenteringRecord {
  std::vector<Eigen::VectorXd> y_means;        // per trajectory
  std::vector<Eigen::VectorXd> control_means;  // per trajectory, for evaluation
};

// Shifts every y sequence by its empirical per-environment mean and zeroes
// the spec means (recording them), so downstream fitting can assume
// zero-mean signals. Idempotent. When known control means are passed they
// override the spec means in the record.
std::pair<TrajectorySet, CenteringRecord> center(
    const TrajectorySet& data,
    const std::optional<std::vector<Eigen::VectorXd>>& known_control_means = std::nullopt);

// Total negative log-likelihood of the decoded controls over all
// consecutive (y_t, y_{t+1}) pairs:
//   sum_pairs [ 1/2 r^T W_e r + 1/2 sum_i log(2 pi v_i^e) ] - N * logvol(M1)
// with r = M (y_{t+1}; y_t) - mu_u^e, W_e the precision (or covariance)
// weights, and logvol(M1) = 1/2 log det(M1 M1^T); for square M1 that is
// log |det M1|. Throws when M1 is numerically degenerate.
double negative_log_likelihood(const LinearDecoder& decoder, const FittingView& data,
                               const FitConfig& cfg);
double negative_log_likelihood(const LinearDecoder& decoder, const TrajectorySet& data,
                               const FitConfig& cfg);

/// Loss together with its analytic gradient with respect to M.
double nll_and_gradient(const LinearDecoder& decoder, const FittingView& data,
                        const FitConfig& cfg, Eigen::MatrixXd& grad);

namespace reference {
/// Plain serial evaluation, kept as the reference the parallel kernels are
/// tested and benchmarked against.
double negative_log_likelihood_serial(const LinearDecoder& decoder, const FittingView& data,
                                      const FitConfig& cfg);
double nll_and_gradient_serial(const LinearDecoder& decoder, const FittingView& data,
                               const FitConfig& cfg, Eigen::MatrixXd& grad);
}  // namespace reference

// Minibatch gradient descent over pairs pooled across environments, each
// pair weighted by its environment's covariance. Gradients are clipped in
// Frobenius norm. Deterministic given cfg.seed; returns the decoder with
// the lowest full-data loss seen at any epoch end. Throws on divergence
// (non-finite loss), reporting the epoch.
std::pair<LinearDecoder, FitReport> fit(const FittingView& data, const FitConfig& cfg);
std::pair<LinearDecoder, FitReport> fit(const TrajectorySet& data, const FitConfig& cfg);

/// u_hat_t = M (y_{t+1}; y_t) for each consecutive row pair of y
/// (n x d_y, n >= 2); returns (n-1) x d_u.
Eigen::MatrixXd predict_controls(const LinearDecoder& decoder, const Eigen::MatrixXd& y);

/// Analytic decoder from the true system, u_t = B^{-1}(C^{-1} y_{t+1}
/// - A C^{-1} y_t), via pseudo-inverses when B or C is rectangular.
LinearDecoder analytic_decoder(const StateSpace& sys);

}  // namespace ltisid
