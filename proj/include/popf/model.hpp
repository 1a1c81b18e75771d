// Copyright 2026 The popf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POPF_MODEL_HPP_
#define POPF_MODEL_HPP_

#include <Eigen/Dense>
#include <cmath>

#include "popf/angles.hpp"
#include "popf/types.hpp"

namespace popf {

/// Below this goal distance the bearing to the goal is numerically undefined.
inline constexpr double kRhoSingular = 1e-9;

/// One Euler step of the unicycle:
///   x'     = x + Ts * v_eff * cos(theta)
///   y'     = y + Ts * v_eff * sin(theta)
///   theta' = wrap(theta + Ts * omega_eff)
/// Wheel-speed noise enters through the differential-drive map
///   v_eff     = v + R * (dwr + dwl) / 2
///   omega_eff = omega + R * (dwr - dwl) / L
/// so zero noise reduces to the nominal discrete model.
inline RobotState step_kinematics(const RobotState& state, const ControlCommand& cmd,
                                  const WheelNoise& noise, const RobotGeometry& geom) {
    const double v_eff =
        cmd.v + geom.wheel_radius * (noise.d_omega_r + noise.d_omega_l) / 2.0;
    const double omega_eff =
        cmd.omega + geom.wheel_radius * (noise.d_omega_r - noise.d_omega_l) / geom.wheel_base;
    RobotState next;
    next.x = state.x + geom.sample_time * v_eff * std::cos(state.theta);
    next.y = state.y + geom.sample_time * v_eff * std::sin(state.theta);
    next.theta = wrap_angle(state.theta + geom.sample_time * omega_eff);
    return next;
}

/// Full-pose measurement z = [x, y, theta]^T + noise, theta component wrapped.
inline Eigen::Vector3d measure(const RobotState& state, const Eigen::Vector3d& meas_noise) {
    return {state.x + meas_noise(0), state.y + meas_noise(1),
            wrap_angle(state.theta + meas_noise(2))};
}

/// Goal error in polar coordinates. With e = goal - position and
/// beta = atan2(e_y, e_x):
///   rho = |e|, alpha = wrap(beta - theta), phi = wrap(beta - goal.theta).
/// Inside the singular radius the direction to the goal is undefined and both
/// angles are reported as zero.
inline PolarError polar_transform(const RobotState& state, const RobotState& goal) {
    const double ex = goal.x - state.x;
    const double ey = goal.y - state.y;
    PolarError err;
    err.rho = std::hypot(ex, ey);
    if (err.rho < kRhoSingular) {
        err.alpha = 0.0;
        err.phi = 0.0;
        return err;
    }
    const double beta = std::atan2(ey, ex);
    err.alpha = wrap_angle(beta - state.theta);
    err.phi = wrap_angle(beta - goal.theta);
    return err;
}

/// State Jacobian of step_kinematics at the estimate and the applied command:
///   [[1, 0, -Ts*v*sin(theta)], [0, 1, Ts*v*cos(theta)], [0, 0, 1]].
inline Eigen::Matrix3d jacobian_A(const RobotState& est, const ControlCommand& cmd,
                                  const RobotGeometry& geom) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    A(0, 2) = -geom.sample_time * cmd.v * std::sin(est.theta);
    A(1, 2) = geom.sample_time * cmd.v * std::cos(est.theta);
    return A;
}

/// Wheel-noise Jacobian of step_kinematics:
///   Ts*(R/2) * [[cos, cos], [sin, sin], [2/L, -2/L]].
/// The opposite signs in the third row follow from omega = R*(wr - wl)/L.
inline Eigen::Matrix<double, 3, 2> jacobian_W(const RobotState& est,
                                              const RobotGeometry& geom) {
    const double c = geom.sample_time * geom.wheel_radius / 2.0;
    Eigen::Matrix<double, 3, 2> W;
    W << std::cos(est.theta), std::cos(est.theta),
         std::sin(est.theta), std::sin(est.theta),
         2.0 / geom.wheel_base, -2.0 / geom.wheel_base;
    return c * W;
}

}  // namespace popf

#endif  // POPF_MODEL_HPP_
