#pragma once

#include "ltisid/state_space.hpp"

namespace ltisid {

// Permanent-magnet DC motor: armature current i and rotor angle theta as
// states, supply voltage u as control, both states observed.
struct DcMotorParams {
  double resistance = 1.0;   // R, ohm
  double inductance = 1.0;   // L, henry
  double emf_constant = 1.0;  // K, volt-second
  double inertia = 1.0;      // J, kg m^2
  double damping = 1.0;      // D, N m s
};

// d/dt [i; theta] = [[-R/L, K/L], [-K/J, -D/J]] [i; theta] + [1/L; 0] u,
// y = [i; theta]. Hurwitz-stable for any positive parameters.
ContinuousStateSpace dc_motor(const DcMotorParams& p = {});

}  // namespace ltisid
