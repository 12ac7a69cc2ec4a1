#include "ltisid/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

#include "ltisid/environments.hpp"
#include "ltisid/parallel.hpp"
#include "ltisid/rng.hpp"

namespace ltisid {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr double kDegenerateLogVol = -690.7755278982137;  // log(1e-300)

struct EnvTerms {
  const Eigen::MatrixXd* y = nullptr;
  Eigen::VectorXd weights;  // precision (1/v) or covariance (v) diagonal
  Eigen::VectorXd mean;     // recorded control mean
  double pair_const = 0.0;  // 1/2 sum_i log(2 pi v_i), precision weighting only
  std::size_t offset = 0;
  std::size_t count = 0;
};

struct LossTable {
  std::vector<EnvTerms> envs;
  std::size_t total_pairs = 0;
  int d_u = 0;
  int d_y = 0;
};

LossTable build_table(const LinearDecoder& decoder, const FittingView& data,
                      const FitConfig& cfg) {
  if (data.envs.empty()) throw std::invalid_argument("no trajectories to evaluate");
  LossTable table;
  table.d_u = data.d_u();
  table.d_y = data.d_y();
  if (decoder.control_dim() != table.d_u || decoder.M.cols() != 2 * table.d_y) {
    throw std::invalid_argument("decoder shape does not match the data");
  }
  for (const auto& env : data.envs) {
    if (env.y->cols() != table.d_y || env.spec->control_dim() != table.d_u) {
      throw std::invalid_argument("trajectories disagree on dimensions");
    }
    if ((env.spec->variances.array() <= 0.0).any()) {
      throw std::invalid_argument("environment covariance must be positive definite");
    }
    EnvTerms terms;
    terms.y = env.y;
    terms.mean = env.spec->mean;
    terms.offset = table.total_pairs;
    terms.count = env.y->rows() >= 2 ? static_cast<std::size_t>(env.y->rows() - 1) : 0;
    if (cfg.weighting == LossWeighting::kPrecision) {
      terms.weights = env.spec->variances.cwiseInverse();
      terms.pair_const =
          0.5 * (env.spec->variances.array().log() + kLog2Pi).sum();
    } else {
      terms.weights = env.spec->variances;
      terms.pair_const = 0.0;
    }
    table.total_pairs += terms.count;
    table.envs.push_back(std::move(terms));
  }
  if (table.total_pairs == 0) throw std::invalid_argument("no (y_t, y_{t+1}) pairs in the data");
  return table;
}

/// 1/2 log det(M1 M1^T); equals log |det M1| for square M1. Optionally its
/// gradient (M1 M1^T)^{-1} M1.
double log_volume(const Eigen::MatrixXd& m1, Eigen::MatrixXd* grad) {
  const Eigen::MatrixXd gram = m1 * m1.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("degenerate decoder: M1 has (numerically) dependent rows");
  }
  double log_vol = 0.0;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_vol += std::log(L(i, i));
  if (log_vol < kDegenerateLogVol) {
    throw std::runtime_error("degenerate decoder: |det M1| underflows");
  }
  if (grad != nullptr) *grad = llt.solve(m1);
  return log_vol;
}

struct PairLoss {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // empty unless gradients requested
};

// Quadratic + constant terms for pairs [begin, end) in global order. The
// volume term is added by the caller.
PairLoss pair_range_loss(const LossTable& table, const Eigen::MatrixXd& m1,
                         const Eigen::MatrixXd& m2, std::size_t begin, std::size_t end,
                         bool with_grad) {
  PairLoss out;
  if (with_grad) out.grad = Eigen::MatrixXd::Zero(m1.rows(), m1.cols() + m2.cols());
  for (const auto& env : table.envs) {
    if (env.count == 0 || begin >= env.offset + env.count || end <= env.offset) continue;
    const std::size_t lo = std::max(begin, env.offset) - env.offset;
    const std::size_t hi = std::min(end, env.offset + env.count) - env.offset;
    for (std::size_t t = lo; t < hi; ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      const Eigen::VectorXd residual = m1 * env.y->row(row + 1).transpose() +
                                       m2 * env.y->row(row).transpose() - env.mean;
      const Eigen::VectorXd weighted = env.weights.cwiseProduct(residual);
      out.loss += 0.5 * residual.dot(weighted) + env.pair_const;
      if (with_grad) {
        out.grad.leftCols(m1.cols()).noalias() += weighted * env.y->row(row + 1);
        out.grad.rightCols(m2.cols()).noalias() += weighted * env.y->row(row);
      }
    }
  }
  return out;
}

double nll_impl(const LinearDecoder& decoder, const FittingView& data, const FitConfig& cfg,
                Eigen::MatrixXd* grad) {
  const LossTable table = build_table(decoder, data, cfg);
  const Eigen::MatrixXd m1 = decoder.m1();
  const Eigen::MatrixXd m2 = decoder.m2();
  const bool with_grad = grad != nullptr;

  PairLoss zero;
  if (with_grad) zero.grad = Eigen::MatrixXd::Zero(decoder.M.rows(), decoder.M.cols());
  PairLoss total = blocked_reduce(
      table.total_pairs, zero,
      [&](std::size_t begin, std::size_t end) {
        return pair_range_loss(table, m1, m2, begin, end, with_grad);
      },
      [&](PairLoss acc, const PairLoss& part) {
        acc.loss += part.loss;
        if (with_grad) acc.grad += part.grad;
        return acc;
      });

  if (cfg.include_log_det) {
    Eigen::MatrixXd vol_grad;
    const double log_vol = log_volume(m1, with_grad ? &vol_grad : nullptr);
    const auto n = static_cast<double>(table.total_pairs);
    total.loss -= n * log_vol;
    if (with_grad) total.grad.leftCols(m1.cols()) -= n * vol_grad;
  }
  if (with_grad) *grad = std::move(total.grad);
  return total.loss;
}

LinearDecoder initial_decoder(int d_u, int d_y, const FitConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 0));
  const int cols = 2 * d_y;
  if (cfg.init == DecoderInit::kOrthogonal) {
    // Q factor of a seeded Gaussian square matrix, sign-fixed so diag(R) > 0,
    // truncated to the first d_u rows.
    Eigen::MatrixXd g(cols, cols);
    for (int i = 0; i < cols; ++i)
      for (int j = 0; j < cols; ++j) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < cols; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return LinearDecoder(q.transpose().topRows(d_u));
  }
  Eigen::MatrixXd m(d_u, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (int i = 0; i < d_u; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.gaussian();
  return LinearDecoder(m);
}

void warn_if_rank_deficient(const FittingView& data) {
  std::map<int, const EnvironmentSpec*> unique;
  for (const auto& env : data.envs) unique[env.spec->index] = env.spec;
  if (unique.size() < 2) throw std::invalid_argument("fit requires at least 2 environments");
  std::vector<EnvironmentSpec> specs;
  specs.reserve(unique.size());
  for (const auto& [idx, spec] : unique) specs.push_back(*spec);
  const DesignDiagnostics diag = variability_matrix(specs);
  if (!diag.satisfies_variability) {
    std::cerr << "ltisid: warning: environment variability matrix is rank deficient ("
              << diag.column_rank << " < " << specs.front().control_dim()
              << "); the decoder is not identifiable\n";
  }
}

}  // namespace

std::pair<TrajectorySet, CenteringRecord> center(
    const TrajectorySet& data,
    const std::optional<std::vector<Eigen::VectorXd>>& known_control_means) {
  if (known_control_means && known_control_means->size() != data.specs.size()) {
    throw std::invalid_argument("known control means must match the environment count");
  }
  TrajectorySet out = data;
  CenteringRecord record;

  // Pool rows per environment, then shift every trajectory of that
  // environment by the pooled empirical mean.
  std::map<int, std::pair<Eigen::VectorXd, std::size_t>> pooled;
  for (const auto& traj : data.trajectories) {
    auto [it, inserted] = pooled.try_emplace(
        traj.env_index, Eigen::VectorXd::Zero(traj.y.cols()), std::size_t{0});
    it->second.first += traj.y.colwise().sum().transpose();
    it->second.second += static_cast<std::size_t>(traj.y.rows());
  }
  for (auto& [env, acc] : pooled) acc.first /= static_cast<double>(acc.second);

  record.y_means.reserve(out.trajectories.size());
  record.control_means.reserve(out.trajectories.size());
  for (auto& traj : out.trajectories) {
    const Eigen::VectorXd& mean = pooled.at(traj.env_index).first;
    traj.y.rowwise() -= mean.transpose();
    record.y_means.push_back(mean);
    const auto spec_idx = static_cast<std::size_t>(traj.env_index);
    if (known_control_means) {
      record.control_means.push_back((*known_control_means)[spec_idx]);
    } else if (spec_idx < data.specs.size()) {
      record.control_means.push_back(data.specs[spec_idx].mean);
    } else {
      record.control_means.push_back(Eigen::VectorXd::Zero(data.d_u()));
    }
  }
  for (auto& spec : out.specs) spec.mean.setZero();
  return {std::move(out), std::move(record)};
}

double negative_log_likelihood(const LinearDecoder& decoder, const FittingView& data,
                               const FitConfig& cfg) {
  return nll_impl(decoder, data, cfg, nullptr);
}

double negative_log_likelihood(const LinearDecoder& decoder, const TrajectorySet& data,
                               const FitConfig& cfg) {
  return nll_impl(decoder, FittingView::of(data), cfg, nullptr);
}

double nll_and_gradient(const LinearDecoder& decoder, const FittingView& data,
                        const FitConfig& cfg, Eigen::MatrixXd& grad) {
  return nll_impl(decoder, data, cfg, &grad);
}

namespace reference {

double nll_and_gradient_serial(const LinearDecoder& decoder, const FittingView& data,
                               const FitConfig& cfg, Eigen::MatrixXd& grad) {
  const LossTable table = build_table(decoder, data, cfg);
  const Eigen::MatrixXd m1 = decoder.m1();
  const Eigen::MatrixXd m2 = decoder.m2();
  PairLoss total = pair_range_loss(table, m1, m2, 0, table.total_pairs, true);
  if (cfg.include_log_det) {
    Eigen::MatrixXd vol_grad;
    const double log_vol = log_volume(m1, &vol_grad);
    const auto n = static_cast<double>(table.total_pairs);
    total.loss -= n * log_vol;
    total.grad.leftCols(m1.cols()) -= n * vol_grad;
  }
  grad = std::move(total.grad);
  return total.loss;
}

double negative_log_likelihood_serial(const LinearDecoder& decoder, const FittingView& data,
                                      const FitConfig& cfg) {
  const LossTable table = build_table(decoder, data, cfg);
  PairLoss total = pair_range_loss(table, decoder.m1(), decoder.m2(), 0, table.total_pairs, false);
  if (cfg.include_log_det) {
    total.loss -= static_cast<double>(table.total_pairs) * log_volume(decoder.m1(), nullptr);
  }
  return total.loss;
}

}  // namespace reference

std::pair<LinearDecoder, FitReport> fit(const FittingView& data, const FitConfig& cfg) {
  if (cfg.learning_rate <= 0.0 || cfg.batch_size < 1 || cfg.epochs < 1 ||
      cfg.grad_clip_norm <= 0.0) {
    throw std::invalid_argument("fit config fields must be positive");
  }
  warn_if_rank_deficient(data);

  const auto start = std::chrono::steady_clock::now();
  LinearDecoder decoder = initial_decoder(data.d_u(), data.d_y(), cfg);
  const LossTable table = build_table(decoder, data, cfg);
  const Eigen::Index d_y = data.d_y();

  std::vector<std::size_t> order(table.total_pairs);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::size_t> env_ends;
  env_ends.reserve(table.envs.size());
  for (const auto& env : table.envs) env_ends.push_back(env.offset + env.count);
  Rng shuffle_rng(derive_seed(cfg.seed, 1));

  FitReport report;
  report.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs));
  LinearDecoder best = decoder;
  double best_loss = std::numeric_limits<double>::infinity();

  Eigen::MatrixXd grad(decoder.M.rows(), decoder.M.cols());
  Eigen::VectorXd residual(decoder.M.rows());
  Eigen::VectorXd weighted(decoder.M.rows());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    for (std::size_t batch_start = 0; batch_start < order.size();
         batch_start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t batch_end =
          std::min(batch_start + static_cast<std::size_t>(cfg.batch_size), order.size());
      const auto batch_n = static_cast<double>(batch_end - batch_start);

      const auto m1 = decoder.M.leftCols(d_y);
      const auto m2 = decoder.M.rightCols(d_y);
      grad.setZero();
      for (std::size_t b = batch_start; b < batch_end; ++b) {
        const std::size_t p = order[b];
        const auto it = std::upper_bound(env_ends.begin(), env_ends.end(), p);
        const EnvTerms& env = table.envs[static_cast<std::size_t>(it - env_ends.begin())];
        const auto row = static_cast<Eigen::Index>(p - env.offset);
        residual.noalias() = m1 * env.y->row(row + 1).transpose();
        residual.noalias() += m2 * env.y->row(row).transpose();
        residual -= env.mean;
        weighted = env.weights.cwiseProduct(residual);
        grad.leftCols(d_y).noalias() += weighted * env.y->row(row + 1);
        grad.rightCols(d_y).noalias() += weighted * env.y->row(row);
      }
      grad /= batch_n;
      if (cfg.include_log_det) {
        Eigen::MatrixXd vol_grad;
        log_volume(m1, &vol_grad);
        grad.leftCols(d_y) -= vol_grad;
      }
      const double norm = grad.norm();
      if (norm > cfg.grad_clip_norm) grad *= cfg.grad_clip_norm / norm;
      decoder.M -= cfg.learning_rate * grad;
    }

    const double loss = nll_impl(decoder, data, cfg, nullptr);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("fit diverged: non-finite loss at epoch " + std::to_string(epoch));
    }
    report.loss_curve.push_back(loss);
    if (loss < best_loss) {
      best_loss = loss;
      best = decoder;
    }
  }

  report.epochs_run = cfg.epochs;
  report.final_loss = best_loss;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(best), std::move(report)};
}

std::pair<LinearDecoder, FitReport> fit(const TrajectorySet& data, const FitConfig& cfg) {
  return fit(FittingView::of(data), cfg);
}

Eigen::MatrixXd predict_controls(const LinearDecoder& decoder, const Eigen::MatrixXd& y) {
  if (y.rows() < 2) throw std::invalid_argument("need at least two observations");
  if (y.cols() != decoder.output_dim()) {
    throw std::invalid_argument("observation dimension does not match the decoder");
  }
  const Eigen::Index n_pairs = y.rows() - 1;
  const Eigen::MatrixXd m1 = decoder.m1();
  const Eigen::MatrixXd m2 = decoder.m2();
  Eigen::MatrixXd u_hat(n_pairs, decoder.control_dim());
  u_hat.noalias() = y.bottomRows(n_pairs) * m1.transpose() + y.topRows(n_pairs) * m2.transpose();
  return u_hat;
}

LinearDecoder analytic_decoder(const StateSpace& sys) {
  check_consistent(sys);
  const Eigen::MatrixXd b_pinv = sys.B.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd c_pinv = sys.C.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::MatrixXd m(sys.control_dim(), 2 * sys.output_dim());
  m.leftCols(sys.output_dim()) = b_pinv * c_pinv;
  m.rightCols(sys.output_dim()) = -b_pinv * sys.A * c_pinv;
  return LinearDecoder(m);
}

}  // namespace ltisid
