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

#ifndef POPF_ANGLES_HPP_
#define POPF_ANGLES_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace popf {

/// Wraps an angle into (-pi, pi]. +pi maps to itself, -pi maps to +pi.
inline double wrap_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::domain_error("wrap_angle: non-finite angle");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(theta + std::numbers::pi, two_pi);
    if (r <= 0.0) {
        r += two_pi;
    }
    return r - std::numbers::pi;
}

/// Difference a - b wrapped into (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

}  // namespace popf

#endif  // POPF_ANGLES_HPP_
