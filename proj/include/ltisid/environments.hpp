#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace ltisid {

// One intervention environment: the control signal is drawn from a diagonal
// Gaussian with these per-component variances (and optional mean).
struct EnvironmentSpec {
  int index = 0;
  Eigen::VectorXd variances;  // (sigma_i^e)^2, componentwise
  Eigen::VectorXd mean;       // mu_u^e, defaults to zero

  EnvironmentSpec() = default;
  EnvironmentSpec(int index_in, Eigen::VectorXd variances_in);
  EnvironmentSpec(int index_in, Eigen::VectorXd variances_in, Eigen::VectorXd mean_in);

  int control_dim() const { return static_cast<int>(variances.size()); }
};

// Diagnostics of an intervention design. delta holds the inverse-variance
// differences against environment 0:
//   delta(e-1, i) = 1/variance_i^e - 1/variance_i^0,  e = 1..E-1.
// The identically-zero base row is excluded. Full column rank is the
// sufficient-diversity condition; the condition number is the ratio of the
// extreme singular values of delta.
struct DesignDiagnostics {
  Eigen::MatrixXd delta;  // (E-1) x d_u
  int column_rank = 0;
  double condition_number = 0.0;  // +inf when rank deficient
  bool satisfies_variability = false;
};

/// Requires at least two environments with matching control dimension and
/// strictly positive variances.
DesignDiagnostics variability_matrix(const std::vector<EnvironmentSpec>& specs);

/// The minimal-condition-number design: base environment has every variance
/// `low`; environment e (1..d_u) raises component e-1 to `high`. The
/// resulting delta is a nonzero multiple of the identity, condition number 1.
std::vector<EnvironmentSpec> design_max_variability(int d_u, double high = 0.9999,
                                                    double low = 0.0001);

/// E environments (E > d_u required) with variances i.i.d. uniform on
/// [lo, hi]; deterministic given the seed. Means are zero.
std::vector<EnvironmentSpec> sample_random_design(int d_u, int n_envs, double lo, double hi,
                                                  std::uint64_t seed);

}  // namespace ltisid
