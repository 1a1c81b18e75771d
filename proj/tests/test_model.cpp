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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "popf/model.hpp"
#include "popf/rng.hpp"
#include "support/finite_diff.hpp"

using namespace popf;
using std::numbers::pi;

namespace {
const RobotGeometry kGeom{0.05, 0.6, 0.01};
}

TEST_CASE("step_kinematics matches the discrete unicycle model") {
    const ControlCommand fwd{1.0, 0.0};
    RobotState s = step_kinematics({0, 0, 0}, fwd, {}, kGeom);
    CHECK(s.x == Catch::Approx(0.01));
    CHECK(s.y == 0.0);
    CHECK(s.theta == 0.0);

    s = step_kinematics({0, 0, pi / 2}, fwd, {}, kGeom);
    CHECK(s.x == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.y == Catch::Approx(0.01));
    CHECK(s.theta == Catch::Approx(pi / 2));

    s = step_kinematics({0, 0, 0}, {0.0, 2.0}, {}, kGeom);
    CHECK(s.x == 0.0);
    CHECK(s.y == 0.0);
    CHECK(s.theta == Catch::Approx(0.02));
}

TEST_CASE("step_kinematics with zero noise and zero command is the identity") {
    popf::RandomStream rng(7);
    for (int i = 0; i < 100; ++i) {
        const RobotState s{(rng.next_unit() - 0.5) * 10.0, (rng.next_unit() - 0.5) * 10.0,
                           wrap_angle((rng.next_unit() - 0.5) * 6.0)};
        const RobotState out = step_kinematics(s, {}, {}, kGeom);
        CHECK(out.x == s.x);
        CHECK(out.y == s.y);
        CHECK(out.theta == Catch::Approx(s.theta).margin(1e-15));
    }
}

TEST_CASE("wheel noise enters through the differential-drive map") {
    // Equal wheel perturbations change only the linear speed.
    const RobotState a = step_kinematics({0, 0, 0}, {1, 0}, {2.0, 2.0}, kGeom);
    CHECK(a.x == Catch::Approx(0.01 * (1.0 + 0.05 * 2.0)));
    CHECK(a.theta == 0.0);
    // Opposite perturbations change only the turn rate.
    const RobotState b = step_kinematics({0, 0, 0}, {1, 0}, {2.0, -2.0}, kGeom);
    CHECK(b.x == Catch::Approx(0.01));
    CHECK(b.theta == Catch::Approx(0.01 * 0.05 * 4.0 / 0.6));
}

TEST_CASE("measure adds noise and wraps the heading") {
    const Eigen::Vector3d z0 = measure({1, 2, 0.5}, Eigen::Vector3d::Zero());
    CHECK(z0 == Eigen::Vector3d(1, 2, 0.5));
    const Eigen::Vector3d z1 = measure({0, 0, 0}, {0.1, -0.1, 0.02});
    CHECK(z1 == Eigen::Vector3d(0.1, -0.1, 0.02));
    const Eigen::Vector3d z2 = measure({0, 0, pi}, {0, 0, 0.1});
    CHECK(z2(2) == Catch::Approx(wrap_angle(pi + 0.1)));
    CHECK(z2(2) < 0.0);
}

TEST_CASE("polar_transform geometry") {
    const PolarError e = polar_transform({-3, -3, 0}, {0, 0, 0});
    CHECK(e.rho == Catch::Approx(std::sqrt(18.0)));
    CHECK(e.alpha == Catch::Approx(pi / 4));
    CHECK(e.phi == Catch::Approx(pi / 4));

    const PolarError at_goal = polar_transform({0, 0, 0}, {0, 0, 0});
    CHECK(at_goal.rho == 0.0);
    CHECK(at_goal.alpha == 0.0);
    CHECK(at_goal.phi == 0.0);

    const PolarError side = polar_transform({0, -1, pi / 2}, {0, 0, 0});
    CHECK(side.rho == Catch::Approx(1.0));
    CHECK(side.alpha == Catch::Approx(0.0).margin(1e-15));
    CHECK(side.phi == Catch::Approx(pi / 2));
}

TEST_CASE("polar_transform is invariant under a common frame rotation") {
    popf::RandomStream rng(99);
    for (int i = 0; i < 200; ++i) {
        const RobotState s{(rng.next_unit() - 0.5) * 8.0, (rng.next_unit() - 0.5) * 8.0,
                           wrap_angle((rng.next_unit() - 0.5) * 6.0)};
        const RobotState g{(rng.next_unit() - 0.5) * 8.0, (rng.next_unit() - 0.5) * 8.0,
                           wrap_angle((rng.next_unit() - 0.5) * 6.0)};
        const double delta = (rng.next_unit() - 0.5) * 6.0;
        const double c = std::cos(delta), sn = std::sin(delta);
        const RobotState sr{c * s.x - sn * s.y, sn * s.x + c * s.y,
                            wrap_angle(s.theta + delta)};
        const RobotState gr{c * g.x - sn * g.y, sn * g.x + c * g.y,
                            wrap_angle(g.theta + delta)};
        const PolarError a = polar_transform(s, g);
        const PolarError b = polar_transform(sr, gr);
        CHECK(a.rho == Catch::Approx(b.rho).margin(1e-12));
        CHECK(std::abs(angle_diff(a.alpha, b.alpha)) < 1e-12);
        CHECK(std::abs(angle_diff(a.phi, b.phi)) < 1e-12);
        CHECK(a.rho >= 0.0);
        CHECK((a.alpha > -pi && a.alpha <= pi));
        CHECK((a.phi > -pi && a.phi <= pi));
    }
}

TEST_CASE("jacobian_A closed form") {
    Eigen::Matrix3d A = jacobian_A({0, 0, 0}, {1, 0}, kGeom);
    Eigen::Matrix3d expected;
    expected << 1, 0, 0, 0, 1, 0.01, 0, 0, 1;
    CHECK((A - expected).cwiseAbs().maxCoeff() < 1e-15);

    A = jacobian_A({5, -2, 1.3}, {0, 0.7}, kGeom);
    CHECK(A.isIdentity(1e-15));

    A = jacobian_A({0, 0, pi / 2}, {2, 0}, kGeom);
    CHECK(A(0, 2) == Catch::Approx(-0.02));
    CHECK(A(1, 2) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("jacobian_W closed form") {
    const auto W = jacobian_W({0, 0, 0}, kGeom);
    const double c = 0.01 * 0.05 / 2.0;  // 0.00025
    CHECK(W(0, 0) == Catch::Approx(c));
    CHECK(W(0, 1) == Catch::Approx(c));
    CHECK(W(1, 0) == 0.0);
    CHECK(W(2, 0) == Catch::Approx(c * 2.0 / 0.6));
    CHECK(W(2, 1) == Catch::Approx(-c * 2.0 / 0.6));

    const auto W2 = jacobian_W({0, 0, pi / 2}, kGeom);
    CHECK(W2(0, 0) == Catch::Approx(0.0).margin(1e-18));
    CHECK(W2(1, 0) == Catch::Approx(c));
    // Columns differ only in the sign of the third row.
    CHECK(W2.col(0).head(2) == W2.col(1).head(2));
    CHECK(W2(2, 0) == -W2(2, 1));
}

TEST_CASE("jacobians match central finite differences at random points") {
    popf::RandomStream rng(2024);
    for (int i = 0; i < 100; ++i) {
        const RobotState s{(rng.next_unit() - 0.5) * 6.0, (rng.next_unit() - 0.5) * 6.0,
                           wrap_angle((rng.next_unit() - 0.5) * 6.0)};
        const ControlCommand u{(rng.next_unit() - 0.5) * 4.0,
                               (rng.next_unit() - 0.5) * 4.0};
        const auto f_state = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            // Unwrapped heading keeps the map differentiable for the test.
            const RobotState st{v(0), v(1), v(2)};
            const double veff = u.v;
            Eigen::Vector3d out;
            out << st.x + kGeom.sample_time * veff * std::cos(st.theta),
                st.y + kGeom.sample_time * veff * std::sin(st.theta),
                st.theta + kGeom.sample_time * u.omega;
            return out;
        };
        const Eigen::MatrixXd Js =
            popf::test::finite_diff_jacobian(f_state, s.as_vector(), 1e-6);
        const Eigen::Matrix3d A = jacobian_A(s, u, kGeom);
        CHECK((Js - A).cwiseAbs().maxCoeff() / std::max(1.0, A.cwiseAbs().maxCoeff()) <
              1e-6);

        const auto f_noise = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
            const RobotState out = step_kinematics(s, u, {w(0), w(1)}, kGeom);
            Eigen::Vector3d v = out.as_vector();
            // Undo the wrap so differences stay smooth across +-pi.
            v(2) = s.theta + kGeom.sample_time *
                                 (u.omega + kGeom.wheel_radius * (w(0) - w(1)) /
                                                kGeom.wheel_base);
            return v;
        };
        const Eigen::MatrixXd Jw =
            popf::test::finite_diff_jacobian(f_noise, Eigen::Vector2d::Zero(), 1e-6);
        const auto W = jacobian_W(s, kGeom);
        CHECK((Jw - W).cwiseAbs().maxCoeff() / W.cwiseAbs().maxCoeff() < 1e-6);
    }
}
