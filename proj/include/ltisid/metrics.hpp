#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "ltisid/state_space.hpp"

namespace ltisid {

/// Minimum-cost assignment on a square finite cost matrix (Jonker-Volgenant
/// shortest augmenting paths). Ties are broken toward the lexicographically
/// smallest permutation. Returns (perm, total) with perm[row] = column and
/// total = sum_i cost(i, perm[i]).
std::pair<std::vector<int>, double> linear_sum_assignment(const Eigen::MatrixXd& cost);

struct MccReport {
  double mcc = 0.0;
  std::vector<int> permutation;          // true component i matched to u_hat column permutation[i]
  std::vector<double> per_component_corr;  // |Pearson| at the chosen assignment
  int n_samples = 0;
};

// Mean correlation coefficient: the d x d matrix of absolute Pearson
// correlations between true and recovered components is matched by a
// linear sum assignment maximizing total |corr|; mcc is the mean of the
// matched entries. Rows of the inputs are samples, columns components.
// Throws when a component is constant, naming it.
MccReport mcc(const Eigen::MatrixXd& u_true, const Eigen::MatrixXd& u_hat);

struct TransferEquivalence {
  bool equivalent = false;
  std::vector<int> permutation;  // column j of H1 matches column permutation[j] of H2
  std::vector<double> scales;    // per matched column
  double max_rel_error = 0.0;
};

// Tests H1(z) = H2(z) P D across the sample points: columns are matched by
// assignment on least-squares residuals, the diagonal scales are fitted per
// matched column, and the verdict compares the worst-case relative
// Frobenius error against tol.
TransferEquivalence transfer_equivalence(const StateSpace& sys1, const StateSpace& sys2,
                                         const std::vector<std::complex<double>>& z_samples,
                                         double tol);

/// n points equally spaced on the circle |z| = radius.
std::vector<std::complex<double>> circle_samples(int n, double radius);

}  // namespace ltisid
