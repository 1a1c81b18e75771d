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

#ifndef POPF_CONTROLLER_HPP_
#define POPF_CONTROLLER_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

#include "popf/errors.hpp"
#include "popf/model.hpp"
#include "popf/types.hpp"

namespace popf {

/// Gains of the polar-coordinate posture stabilization law. All strictly
/// positive (required for asymptotic stability).
struct ControllerGains {
    double gamma = 3.0;
    double lambda = 6.0;
    double h = 1.0;

    void validate() const {
        if (!(gamma > 0.0) || !(lambda > 0.0) || !(h > 0.0)) {
            throw ConfigError("ControllerGains: gamma, lambda and h must be positive");
        }
    }
};

/// Optional actuator limits and stop deadband; defaults leave the law untouched.
struct ControllerLimits {
    double v_max = std::numeric_limits<double>::infinity();
    double omega_max = std::numeric_limits<double>::infinity();
    double deadband_rho = 0.0;  // command (0,0) when rho is below this

    void validate() const {
        if (!(v_max > 0.0) || !(omega_max > 0.0) || deadband_rho < 0.0) {
            throw ConfigError("ControllerLimits: v_max/omega_max must be positive, "
                              "deadband_rho nonnegative");
        }
    }
};

/// sin(2a)/(2a) with the removable singularity handled by its series
/// 1 - (2/3)a^2 + (2/15)a^4 for |a| < 1e-4 (series error < 1e-16 there).
inline double half_sinc_2a(double a) {
    if (std::abs(a) < 1e-4) {
        const double a2 = a * a;
        return 1.0 - (2.0 / 3.0) * a2 + (2.0 / 15.0) * a2 * a2;
    }
    return std::cos(a) * std::sin(a) / a;
}

/// Posture stabilization law in polar coordinates:
///   v     = gamma * cos(alpha) * rho
///   omega = lambda * alpha + gamma * (cos(alpha) sin(alpha) / alpha) * (alpha + h*phi)
/// Inside the singular radius (or an optional deadband) the goal direction is
/// undefined and the command is a full stop.
inline ControlCommand stabilize(const PolarError& err, const ControllerGains& gains,
                                const ControllerLimits& limits = {}) {
    gains.validate();
    limits.validate();
    if (err.rho < std::max(limits.deadband_rho, kRhoSingular)) {
        return {0.0, 0.0};
    }
    ControlCommand cmd;
    cmd.v = gains.gamma * std::cos(err.alpha) * err.rho;
    cmd.omega = gains.lambda * err.alpha +
                gains.gamma * half_sinc_2a(err.alpha) * (err.alpha + gains.h * err.phi);
    cmd.v = std::clamp(cmd.v, -limits.v_max, limits.v_max);
    cmd.omega = std::clamp(cmd.omega, -limits.omega_max, limits.omega_max);
    return cmd;
}

}  // namespace popf

#endif  // POPF_CONTROLLER_HPP_
