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
#include <map>
#include <numbers>
#include <vector>

#include "popf/rng.hpp"
#include "popf/robot_filter.hpp"

using namespace popf;
using std::numbers::pi;

namespace {
const RobotGeometry kGeom{0.05, 0.6, 0.01};
const Eigen::Matrix2d kQ = 0.01 * Eigen::Matrix2d::Identity();
const Eigen::Matrix3d kR = Eigen::Vector3d(0.01, 0.01, 0.018).asDiagonal();

RobotBelief belief_at(const RobotState& s) {
    return {s, 0.5 * kR};
}
}  // namespace

TEST_CASE("predict mirrors the kinematics and grows the covariance") {
    RobotPopfFilter f(belief_at({0, 0, 0}), 0, kGeom, kQ, kR);
    f.predict({1.0, 0.0});
    CHECK(f.belief().mean.x == Catch::Approx(0.01));
    CHECK(f.belief().mean.y == 0.0);
    // At theta = 0 the x-variance grows by 2*(Ts*R/2)^2*q per step.
    const double growth = f.belief().cov(0, 0) - 0.5 * kR(0, 0);
    CHECK(growth == Catch::Approx(2.0 * std::pow(0.01 * 0.05 / 2.0, 2) * 0.01));

    RobotPopfFilter g(belief_at({1, 2, 0.4}), 0, kGeom, kQ, kR);
    const Eigen::Matrix3d cov_before = g.belief().cov;
    g.predict({0.0, 0.0});
    CHECK(g.belief().mean.x == 1.0);  // zero command keeps the mean
    CHECK((g.belief().cov - cov_before).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("m=0 pipeline equals the naive EKF step for step") {
    RobotPopfFilter popf(belief_at({-3, -3, 0}), 0, kGeom, kQ, kR);
    RobotNaiveEkf naive(belief_at({-3, -3, 0}), kGeom, kQ, kR);
    RandomStream rng(3);
    GaussianVectorSampler meas(kR);
    RobotState x{-3, -3, 0};
    for (int k = 0; k < 200; ++k) {
        const ControlCommand u{0.5 * rng.next_gaussian(), 0.5 * rng.next_gaussian()};
        x = step_kinematics(x, u, {0.1 * rng.next_gaussian(), 0.1 * rng.next_gaussian()},
                            kGeom);
        popf.predict(u);
        naive.predict(u);
        const Eigen::Vector3d z = measure(x, meas.sample(rng));
        popf.correct(z);
        naive.correct(z);
        CHECK((popf.belief().mean.as_vector() - naive.belief().mean.as_vector())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK((popf.belief().cov - naive.belief().cov).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("heading innovation is wrapped near +-pi") {
    // Truth sits just below +pi; the measurement wraps to just above -pi.
    RobotBelief b{{0, 0, pi - 0.05}, 0.5 * kR};
    RobotPopfFilter f(b, 0, kGeom, kQ, kR);
    const Eigen::Vector3d z(0, 0, -pi + 0.05);  // 0.1 rad away, not ~2*pi
    f.correct(z);
    const double moved = std::abs(angle_diff(f.belief().mean.theta, pi - 0.05));
    CHECK(moved < 0.2);  // a 2*pi jump would move by ~2 rad after gain ~1/3
    CHECK(std::abs(f.belief().mean.theta) > pi - 0.2);
}

TEST_CASE("delayed corrections track a moving robot without bias") {
    const int m = 20;
    RobotPopfFilter f(belief_at({0, 0, 0}), m, kGeom, kQ, kR);
    RandomStream rng(8);
    GaussianVectorSampler wq(kQ), wr(kR);
    RobotState x{0, 0, 0};
    std::map<int, Eigen::Vector3d> pending;
    std::vector<ControlCommand> cmds;
    double worst = 0.0;
    for (int k = 0; k < 600; ++k) {
        const double t = 0.01 * k;
        const ControlCommand u{0.4 * std::sin(0.5 * t) + 0.3, 0.5 * std::cos(0.7 * t)};
        cmds.push_back(u);
        const Eigen::VectorXd w = wq.sample(rng);
        pending[k + m] = measure(x, wr.sample(rng));
        if (auto it = pending.find(k); it != pending.end()) {
            f.correct(it->second);
            pending.erase(it);
        }
        if (k >= 100) {
            const Eigen::Vector3d err =
                f.belief().mean.as_vector() - x.as_vector();
            worst = std::max(worst, err.head(2).cwiseAbs().maxCoeff());
        }
        x = step_kinematics(x, u, {w(0), w(1)}, kGeom);
        f.predict(u);
    }
    CHECK(worst < 0.05);
}

TEST_CASE("naive EKF converges on a static robot but lags a moving one") {
    const int m = 20;
    RandomStream rng(21);
    GaussianVectorSampler wr(kR);

    // Static truth: delayed measurements of a constant are current.
    RobotNaiveEkf stat(belief_at({1, 1, 0.3}), kGeom, kQ, kR);
    const RobotState truth{2, 0.5, -0.4};
    std::map<int, Eigen::Vector3d> pending;
    for (int k = 0; k < 400; ++k) {
        pending[k + m] = measure(truth, wr.sample(rng));
        stat.predict({0, 0});
        if (auto it = pending.find(k); it != pending.end()) {
            stat.correct(it->second);
            pending.erase(it);
        }
    }
    CHECK(std::abs(stat.belief().mean.x - truth.x) < 0.05);
    CHECK(std::abs(stat.belief().mean.y - truth.y) < 0.05);

    // Moving truth: fusing stale measurements as current biases the estimate
    // by roughly the distance covered over the delay.
    RobotNaiveEkf moving(belief_at({0, 0, 0}), kGeom, kQ, kR);
    RobotPopfFilter popf(belief_at({0, 0, 0}), m, kGeom, kQ, kR);
    RobotState x{0, 0, 0};
    pending.clear();
    std::map<int, Eigen::Vector3d> pending2;
    double naive_err = 0.0, popf_err = 0.0;
    for (int k = 0; k < 400; ++k) {
        const ControlCommand u{1.0, 0.0};
        pending[k + m] = measure(x, wr.sample(rng));
        moving.predict(u);
        popf.predict(u);
        if (auto it = pending.find(k); it != pending.end()) {
            moving.correct(it->second);
            popf.correct(it->second);
            pending.erase(it);
        }
        if (k >= 200) {
            naive_err = std::max(naive_err,
                                 std::abs(moving.belief().mean.x - x.x));
            popf_err = std::max(popf_err, std::abs(popf.belief().mean.x - x.x));
        }
        x = step_kinematics(x, u, {}, kGeom);
    }
    CHECK(popf_err < naive_err);
    (void)pending2;
}

TEST_CASE("popf_extrapolate rolls the mean through the schedule") {
    std::vector<ControlCommand> straight(10, ControlCommand{1.0, 0.0});
    RobotState out = popf_extrapolate({0, 0, 0}, straight, kGeom);
    CHECK(out.x == Catch::Approx(0.1));
    CHECK(out.y == 0.0);

    std::vector<ControlCommand> spin(5, ControlCommand{0.0, 1.0});
    out = popf_extrapolate({0, 0, 0}, spin, kGeom);
    CHECK(out.x == 0.0);
    CHECK(out.theta == Catch::Approx(0.05));

    out = popf_extrapolate({1, 2, 0.5}, std::span<const ControlCommand>{}, kGeom);
    CHECK(out.x == 1.0);
    CHECK(out.theta == 0.5);
}
