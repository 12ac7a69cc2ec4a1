#include "ltisid/sysid.hpp"

#include <stdexcept>

namespace ltisid {

namespace {

// Block-Hankel matrix whose (i, j) block (0-indexed) is logical block
// i + j + 1 + shift of mp.
Eigen::MatrixXd hankel_data(const MarkovParams& mp, int T1, int T2, int shift) {
  Eigen::MatrixXd data(T1 * mp.d_y, T2 * mp.d_u);
  for (int i = 0; i < T1; ++i) {
    for (int j = 0; j < T2; ++j) {
      data.block(i * mp.d_y, j * mp.d_u, mp.d_y, mp.d_u) = mp.block(i + j + 1 + shift);
    }
  }
  return data;
}

}  // namespace

HankelMatrix hankel(const MarkovParams& mp, int T1, int T2) {
  if (T1 < 1 || T2 < 1) throw std::invalid_argument("Hankel block counts must be >= 1");
  if (T1 + T2 > mp.horizon) {
    throw std::invalid_argument("Markov horizon too short: need T1 + T2 <= horizon");
  }
  HankelMatrix h;
  h.T1 = T1;
  h.T2 = T2;
  h.d_y = mp.d_y;
  h.d_u = mp.d_u;
  h.data = hankel_data(mp, T1, T2, 0);
  return h;
}

HoKalmanResult ho_kalman(const MarkovParams& mp, int d_x, int T1, int T2) {
  if (d_x < 1) throw std::invalid_argument("state dimension must be >= 1");
  if (T1 < 1 || T2 < 1) throw std::invalid_argument("Hankel block counts must be >= 1");
  if (T1 + T2 + 1 > mp.horizon) {
    throw std::invalid_argument(
        "Markov horizon too short for the shifted Hankel: need T1 + T2 + 1 <= horizon");
  }
  if (d_x > std::min(T1 * mp.d_y, T2 * mp.d_u)) {
    throw std::invalid_argument("requested rank exceeds the Hankel dimensions");
  }

  const Eigen::MatrixXd H = hankel_data(mp, T1, T2, 0);
  const Eigen::MatrixXd H_shift = hankel_data(mp, T1, T2, 1);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  HoKalmanResult result;
  result.singular_values = sv;
  result.effective_rank = d_x;
  result.T1 = T1;
  result.T2 = T2;

  if (sv(d_x - 1) < 1e-10 * sv(0)) {
    throw std::runtime_error("Hankel matrix is rank deficient at the requested state dimension");
  }
  if (sv.size() > d_x && sv(d_x) / sv(d_x - 1) > 0.1) {
    result.ill_conditioned_rank = true;
  }

  // Balanced factors H = O Q with O = U S^{1/2}, Q = S^{1/2} V^T; then
  // A = O^+ H_shift Q^+ = S^{-1/2} U^T H_shift V S^{-1/2}.
  const Eigen::VectorXd s_sqrt = sv.head(d_x).cwiseSqrt();
  const Eigen::VectorXd s_inv_sqrt = s_sqrt.cwiseInverse();
  const Eigen::MatrixXd U = svd.matrixU().leftCols(d_x);
  const Eigen::MatrixXd V = svd.matrixV().leftCols(d_x);

  const Eigen::MatrixXd O = U * s_sqrt.asDiagonal();
  const Eigen::MatrixXd Q = s_sqrt.asDiagonal() * V.transpose();

  Eigen::MatrixXd A_hat =
      s_inv_sqrt.asDiagonal() * (U.transpose() * H_shift * V) * s_inv_sqrt.asDiagonal();
  Eigen::MatrixXd C_hat = O.topRows(mp.d_y);
  Eigen::MatrixXd B_hat = Q.leftCols(mp.d_u);
  result.sys = StateSpace(std::move(A_hat), std::move(B_hat), std::move(C_hat));
  return result;
}

HoKalmanResult ho_kalman(const MarkovParams& mp, int d_x) {
  return ho_kalman(mp, d_x, d_x, d_x);
}

}  // namespace ltisid
