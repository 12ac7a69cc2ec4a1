#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace ltisid {

// Discrete LTI system
//   x_{t+1} = A x_t + B u_t
//   y_t     = C x_t + e_t
struct StateSpace {
  Eigen::MatrixXd A;  // state transition, d_x x d_x
  Eigen::MatrixXd B;  // control, d_x x d_u
  Eigen::MatrixXd C;  // observation, d_y x d_x

  StateSpace() = default;
  StateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, Eigen::MatrixXd C_in);

  int state_dim() const { return static_cast<int>(A.rows()); }
  int control_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }
};

/// Continuous-time counterpart, d/dt x = A_c x + B_c u, y = C_c x.
struct ContinuousStateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;

  ContinuousStateSpace() = default;
  ContinuousStateSpace(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in, Eigen::MatrixXd C_in);

  int state_dim() const { return static_cast<int>(A.rows()); }
  int control_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }
};

/// Throws std::invalid_argument when dimensions disagree or entries are
/// not finite.
void check_consistent(const StateSpace& sys);
void check_consistent(const ContinuousStateSpace& sys);

struct SystemReport {
  double spectral_radius = 0.0;
  bool is_stable = false;
  int controllability_rank = 0;
  int observability_rank = 0;
  bool is_controllable = false;
  bool is_observable = false;
};

/// Spectral radius of A plus Kalman rank tests on [B, AB, ..., A^{n-1}B]
/// and [C; CA; ...; CA^{n-1}]. Ranks use singular-value thresholding at
/// max(dim) * sigma_max * 1e-12.
SystemReport validate_system(const StateSpace& sys);

Eigen::MatrixXd controllability_matrix(const StateSpace& sys);
Eigen::MatrixXd observability_matrix(const StateSpace& sys);

/// Numerical rank by SVD with threshold max(rows, cols) * sigma_max * tol.
int svd_rank(const Eigen::MatrixXd& m, double tol = 1e-12);

/// exp(A) by Pade(13) with scaling and squaring; backward error below
/// ~1e-13 for the 1-norm threshold used. Throws on non-finite results.
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A);

enum class DiscretizationMethod { kZeroOrderHold, kForwardEuler };

// Zero-order hold integrates the control over the step:
//   A = exp(A_c dt),  B = (integral_0^dt exp(A_c s) ds) B_c
// computed jointly through one augmented matrix exponential, which reduces
// to A_c^{-1}(exp(A_c dt) - I) B_c whenever A_c is invertible. Forward
// Euler uses A = I + A_c dt, B = B_c dt. C is unchanged by both.
StateSpace discretize(const ContinuousStateSpace& csys, double dt, DiscretizationMethod method);

/// Change of state coordinates (P A P^{-1}, P B, C P^{-1}). P must be
/// square with condition number below cond_cap.
StateSpace similarity_transform(const StateSpace& sys, const Eigen::MatrixXd& P,
                                double cond_cap = 1e12);

/// H(z) = C (zI - A)^{-1} B. Throws when z is (numerically) a pole.
Eigen::MatrixXcd transfer_function(const StateSpace& sys, std::complex<double> z);

/// Cumulative input-to-output map T_t = sum_{i=1..t} C A^{i-1} B.
Eigen::MatrixXd unrolled_map(const StateSpace& sys, int t);

}  // namespace ltisid
