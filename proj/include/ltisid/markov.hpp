#pragma once

#include <vector>

#include "ltisid/state_space.hpp"

namespace ltisid {

// Markov parameter blocks [I, CB, CAB, ..., C A^{horizon-2} B]. The leading
// identity block is only dimensionally meaningful when d_y == d_u; otherwise
// it is omitted and has_identity_block records that. Logical block k >= 1 is
// always C A^{k-1} B.
struct MarkovParams {
  std::vector<Eigen::MatrixXd> blocks;
  int horizon = 0;
  int d_y = 0;
  int d_u = 0;
  bool has_identity_block = false;

  /// Block at logical index k in [0, horizon). Throws for k = 0 when the
  /// identity block is omitted.
  const Eigen::MatrixXd& block(int k) const;
};

MarkovParams markov_params(const StateSpace& sys, int horizon);

// Block-Hankel arrangement of Markov parameters: (i, j) block (1-indexed)
// is C A^{i+j-2} B, i.e. logical block i + j - 1.
struct HankelMatrix {
  int T1 = 0;
  int T2 = 0;
  int d_y = 0;
  int d_u = 0;
  Eigen::MatrixXd data;  // (T1 d_y) x (T2 d_u)
};

}  // namespace ltisid
