#include "ltisid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ltisid {

namespace {

// Jonker-Volgenant shortest augmenting paths; O(n^3), minimizing.
// rows/cols restrict the problem to a submatrix (used by the lexicographic
// tie-breaking pass).
double solve_assignment(const Eigen::MatrixXd& cost, const std::vector<int>& rows,
                        const std::vector<int>& cols, std::vector<int>& row_to_col) {
  const int n = static_cast<int>(rows.size());
  row_to_col.assign(static_cast<std::size_t>(n), -1);
  if (n == 0) return 0.0;

  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1,
                             std::numeric_limits<double>::infinity());
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(rows[static_cast<std::size_t>(i0 - 1)],
                                cols[static_cast<std::size_t>(j - 1)]) -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      const int r = p[static_cast<std::size_t>(j)] - 1;
      row_to_col[static_cast<std::size_t>(r)] = j - 1;
      total += cost(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(j - 1)]);
    }
  }
  return total;
}

}  // namespace

std::pair<std::vector<int>, double> linear_sum_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols() || cost.rows() == 0) {
    throw std::invalid_argument("assignment requires a nonempty square cost matrix");
  }
  if (!cost.allFinite()) throw std::invalid_argument("assignment cost matrix must be finite");
  const int n = static_cast<int>(cost.rows());

  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> sub_assignment;
  const double optimum = solve_assignment(cost, all, all, sub_assignment);
  const double tol = 1e-12 * (1.0 + std::abs(optimum));

  // Fix rows in order to the smallest column index that still admits an
  // optimal completion; this makes ties deterministic (lexicographically
  // smallest optimal permutation).
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  std::vector<int> free_cols(all);
  double fixed_cost = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> tail_rows;
    for (int r = i + 1; r < n; ++r) tail_rows.push_back(r);
    bool placed = false;
    for (std::size_t c = 0; c < free_cols.size() && !placed; ++c) {
      const int col = free_cols[c];
      std::vector<int> tail_cols;
      for (std::size_t k = 0; k < free_cols.size(); ++k) {
        if (k != c) tail_cols.push_back(free_cols[k]);
      }
      const double tail = solve_assignment(cost, tail_rows, tail_cols, sub_assignment);
      if (fixed_cost + cost(i, col) + tail <= optimum + tol) {
        perm[static_cast<std::size_t>(i)] = col;
        fixed_cost += cost(i, col);
        free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(c));
        placed = true;
      }
    }
    if (!placed) throw std::logic_error("assignment refinement failed to place a row");
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
  return {std::move(perm), total};
}

MccReport mcc(const Eigen::MatrixXd& u_true, const Eigen::MatrixXd& u_hat) {
  if (u_true.rows() != u_hat.rows() || u_true.cols() != u_hat.cols()) {
    throw std::invalid_argument("mcc: signals must have matching shapes");
  }
  if (u_true.rows() < 2) throw std::invalid_argument("mcc: need at least 2 samples");
  const Eigen::Index n = u_true.rows();
  const Eigen::Index d = u_true.cols();

  const Eigen::MatrixXd t_centered = u_true.rowwise() - u_true.colwise().mean();
  const Eigen::MatrixXd h_centered = u_hat.rowwise() - u_hat.colwise().mean();
  const Eigen::VectorXd t_norm = t_centered.colwise().norm();
  const Eigen::VectorXd h_norm = h_centered.colwise().norm();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (t_norm(i) == 0.0) {
      throw std::runtime_error("mcc: true component " + std::to_string(i) +
                               " is constant, correlation undefined");
    }
    if (h_norm(i) == 0.0) {
      throw std::runtime_error("mcc: recovered component " + std::to_string(i) +
                               " is constant, correlation undefined");
    }
  }

  // |corr|(true i, hat j); assignment maximizes the total.
  Eigen::MatrixXd abs_corr =
      ((t_centered.transpose() * h_centered).array() /
       (t_norm * h_norm.transpose()).array())
          .abs()
          .matrix();
  auto [perm, neg_total] = linear_sum_assignment(-abs_corr);

  MccReport report;
  report.permutation = perm;
  report.n_samples = static_cast<int>(n);
  report.per_component_corr.resize(static_cast<std::size_t>(d));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double c = abs_corr(i, perm[static_cast<std::size_t>(i)]);
    report.per_component_corr[static_cast<std::size_t>(i)] = c;
    sum += c;
  }
  report.mcc = sum / static_cast<double>(d);
  return report;
}

std::vector<std::complex<double>> circle_samples(int n, double radius) {
  std::vector<std::complex<double>> z;
  z.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * k / n;
    z.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
  }
  return z;
}

TransferEquivalence transfer_equivalence(const StateSpace& sys1, const StateSpace& sys2,
                                         const std::vector<std::complex<double>>& z_samples,
                                         double tol) {
  if (sys1.output_dim() != sys2.output_dim() || sys1.control_dim() != sys2.control_dim()) {
    throw std::invalid_argument("transfer equivalence requires matching (d_y, d_u)");
  }
  if (z_samples.empty()) throw std::invalid_argument("no z samples given");
  const int d_u = sys1.control_dim();
  const int d_y = sys1.output_dim();
  const auto n_z = static_cast<Eigen::Index>(z_samples.size());

  // Stack H(z) columns across samples: column j becomes a vector in
  // C^{n_z * d_y}.
  Eigen::MatrixXcd cols1(n_z * d_y, d_u), cols2(n_z * d_y, d_u);
  for (Eigen::Index k = 0; k < n_z; ++k) {
    const Eigen::MatrixXcd h1 = transfer_function(sys1, z_samples[static_cast<std::size_t>(k)]);
    const Eigen::MatrixXcd h2 = transfer_function(sys2, z_samples[static_cast<std::size_t>(k)]);
    cols1.middleRows(k * d_y, d_y) = h1;
    cols2.middleRows(k * d_y, d_y) = h2;
  }

  // Column-matching residuals under the best real scale per pair.
  Eigen::MatrixXd residual(d_u, d_u);
  Eigen::MatrixXd best_scale(d_u, d_u);
  for (int j = 0; j < d_u; ++j) {
    for (int k = 0; k < d_u; ++k) {
      const auto& target = cols1.col(j);
      const auto& source = cols2.col(k);
      const double denom = source.squaredNorm();
      double scale = 0.0;
      if (denom > 0.0) scale = (source.dot(target)).real() / denom;
      best_scale(j, k) = scale;
      residual(j, k) = (target - scale * source).squaredNorm();
    }
  }
  auto [perm, total] = linear_sum_assignment(residual);
  (void)total;

  TransferEquivalence result;
  result.permutation = perm;
  result.scales.resize(static_cast<std::size_t>(d_u));
  for (int j = 0; j < d_u; ++j) {
    result.scales[static_cast<std::size_t>(j)] = best_scale(j, perm[static_cast<std::size_t>(j)]);
  }

  double worst = 0.0;
  for (Eigen::Index k = 0; k < n_z; ++k) {
    const Eigen::MatrixXcd h1 = cols1.middleRows(k * d_y, d_y);
    Eigen::MatrixXcd h2_matched(d_y, d_u);
    for (int j = 0; j < d_u; ++j) {
      h2_matched.col(j) = result.scales[static_cast<std::size_t>(j)] *
                          cols2.col(perm[static_cast<std::size_t>(j)]).segment(k * d_y, d_y);
    }
    const double denom = h1.norm();
    const double err = (h1 - h2_matched).norm() / (denom > 0.0 ? denom : 1.0);
    worst = std::max(worst, err);
  }
  result.max_rel_error = worst;
  result.equivalent = worst <= tol;
  return result;
}

}  // namespace ltisid
