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

#ifndef POPF_TYPES_HPP_
#define POPF_TYPES_HPP_

#include <Eigen/Dense>
#include <cmath>

#include "popf/errors.hpp"

namespace popf {

/// Pose (x, y, theta) of the robot in the global frame. theta in (-pi, pi].
struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Eigen::Vector3d as_vector() const { return {x, y, theta}; }
    static RobotState from_vector(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
    }
};

/// Velocity command: linear speed v [m/s] and turn rate omega [rad/s].
struct ControlCommand {
    double v = 0.0;
    double omega = 0.0;

    bool finite() const { return std::isfinite(v) && std::isfinite(omega); }
};

/// Per-wheel speed perturbations [rad/s]; the process noise acting on the plant.
struct WheelNoise {
    double d_omega_r = 0.0;
    double d_omega_l = 0.0;
};

/// Goal error in polar coordinates: distance rho, bearing of the goal in the
/// robot frame (alpha) and in the goal frame (phi).
struct PolarError {
    double rho = 0.0;
    double alpha = 0.0;
    double phi = 0.0;
};

/// Wheel radius R, wheel base L and sample time Ts. All strictly positive.
struct RobotGeometry {
    double wheel_radius = 0.05;
    double wheel_base = 0.6;
    double sample_time = 0.01;

    void validate() const {
        if (!(wheel_radius > 0.0) || !(wheel_base > 0.0) || !(sample_time > 0.0)) {
            throw ConfigError("RobotGeometry: wheel_radius, wheel_base and sample_time "
                              "must be strictly positive");
        }
    }
};

/// Constant channel delays in steps: n for control, m for measurements.
struct DelayConfig {
    int n = 0;
    int m = 0;

    void validate() const {
        if (n < 0 || m < 0) {
            throw ConfigError("DelayConfig: delays must be nonnegative integers");
        }
    }
};

/// Process noise covariance Q (2x2, wheel speeds) and measurement noise
/// covariance R (3x3, pose).
struct NoiseModel {
    Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
    Eigen::Matrix3d R_meas = Eigen::Matrix3d::Zero();

    void validate() const;
};

namespace detail {
inline bool symmetric_psd(const Eigen::MatrixXd& M, double tol = 1e-9) {
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    return es.eigenvalues().minCoeff() >= -tol;
}
}  // namespace detail

inline void NoiseModel::validate() const {
    if (!detail::symmetric_psd(Q)) {
        throw ConfigError("NoiseModel: Q must be symmetric positive semidefinite");
    }
    if (!detail::symmetric_psd(R_meas)) {
        throw ConfigError("NoiseModel: R must be symmetric positive semidefinite");
    }
}

}  // namespace popf

#endif  // POPF_TYPES_HPP_
