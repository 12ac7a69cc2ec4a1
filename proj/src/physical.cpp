#include "ltisid/physical.hpp"

#include <stdexcept>

namespace ltisid {

ContinuousStateSpace dc_motor(const DcMotorParams& p) {
  if (!(p.resistance > 0.0 && p.inductance > 0.0 && p.emf_constant > 0.0 && p.inertia > 0.0 &&
        p.damping > 0.0)) {
    throw std::invalid_argument("DC motor parameters must all be positive");
  }
  Eigen::MatrixXd A(2, 2);
  A << -p.resistance / p.inductance, p.emf_constant / p.inductance,
      -p.emf_constant / p.inertia, -p.damping / p.inertia;
  Eigen::MatrixXd B(2, 1);
  B << 1.0 / p.inductance, 0.0;
  return ContinuousStateSpace(A, B, Eigen::MatrixXd::Identity(2, 2));
}

}  // namespace ltisid
