#pragma once

#include "ltisid/markov.hpp"

namespace ltisid {

/// Hankel matrix from logical blocks 1..T1+T2-1; requires T1 + T2 <= horizon.
HankelMatrix hankel(const MarkovParams& mp, int T1, int T2);

struct HoKalmanResult {
  StateSpace sys;
  Eigen::VectorXd singular_values;  // all Hankel singular values, nonincreasing
  int effective_rank = 0;           // the requested state dimension
  int T1 = 0;
  int T2 = 0;
  bool ill_conditioned_rank = false;  // sigma_{d_x+1} / sigma_{d_x} > 0.1
};

// Ho-Kalman balanced realization. The Hankel matrix is factored through its
// rank-d_x SVD, H = U S V^T ~ O Q with O = U S^{1/2}, Q = S^{1/2} V^T; then
//   C_hat = first d_y rows of O,   B_hat = first d_u columns of Q,
//   A_hat = O^+ H_shift Q^+
// where H_shift is the Hankel built from blocks shifted by one. Requires
// horizon >= T1 + T2 + 1 and d_x <= min(T1 d_y, T2 d_u). Throws when
// sigma_{d_x} < 1e-10 sigma_1 (rank assumption violated); flags a warning
// when the spectral gap at d_x is weak.
HoKalmanResult ho_kalman(const MarkovParams& mp, int d_x, int T1, int T2);

/// Defaults T1 = T2 = d_x, the smallest sizes that can reach rank d_x.
HoKalmanResult ho_kalman(const MarkovParams& mp, int d_x);

}  // namespace ltisid
