#include "ltisid/markov.hpp"

#include <stdexcept>

namespace ltisid {

const Eigen::MatrixXd& MarkovParams::block(int k) const {
  if (k < 0 || k >= horizon) throw std::out_of_range("Markov block index out of range");
  if (has_identity_block) return blocks[static_cast<std::size_t>(k)];
  if (k == 0) {
    throw std::logic_error(
        "Markov block 0 is the identity convention block and is omitted when d_y != d_u");
  }
  return blocks[static_cast<std::size_t>(k - 1)];
}

MarkovParams markov_params(const StateSpace& sys, int horizon) {
  check_consistent(sys);
  if (horizon < 1) throw std::invalid_argument("Markov horizon must be >= 1");

  MarkovParams mp;
  mp.horizon = horizon;
  mp.d_y = sys.output_dim();
  mp.d_u = sys.control_dim();
  mp.has_identity_block = mp.d_y == mp.d_u;
  if (mp.has_identity_block) {
    mp.blocks.push_back(Eigen::MatrixXd::Identity(mp.d_y, mp.d_u));
  }
  Eigen::MatrixXd power = sys.B;  // A^{k-1} B
  for (int k = 1; k < horizon; ++k) {
    mp.blocks.push_back(sys.C * power);
    power = sys.A * power;
  }
  return mp;
}

}  // namespace ltisid
