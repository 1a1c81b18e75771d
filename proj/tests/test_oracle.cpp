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

// The test oracles deserve tests of their own: the augmented filter must
// reduce to the plain filter at m=0 and behave sanely on static systems, and
// the finite-difference helper must recover linear maps exactly.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "popf/kalman.hpp"
#include "popf/rng.hpp"
#include "support/augmented_kf.hpp"
#include "support/finite_diff.hpp"

using namespace popf;

namespace {
Eigen::MatrixXd m1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }
Eigen::VectorXd v1(double v) { return Eigen::VectorXd::Constant(1, v); }
}  // namespace

TEST_CASE("augmented filter with m=0 is the plain Kalman filter") {
    GaussianBelief b;
    b.mean = v1(1.5);
    b.cov = m1(2.0);
    test::AugmentedKf aug(b, 0);
    GaussianBelief ref = b;
    RandomStream rng(4);
    for (int k = 0; k < 30; ++k) {
        aug.predict(m1(0.9), m1(1.0), v1(0.1), m1(0.2));
        ref = kf_predict(ref, m1(0.9), m1(1.0), v1(0.1), m1(0.2));
        const Eigen::VectorXd z = v1(rng.next_gaussian());
        aug.correct_delayed(z, m1(1.0), m1(0.5));
        ref = kf_correct(ref, m1(1.0), z, m1(0.5));
        const GaussianBelief top = aug.top();
        CHECK((top.mean - ref.mean).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((top.cov - ref.cov).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("static scalar system: delayed measurement fuses like a current one") {
    GaussianBelief b;
    b.mean = v1(0.0);
    b.cov = m1(1.0);
    test::AugmentedKf aug(b, 3);
    for (int k = 0; k < 3; ++k) {
        aug.predict(m1(1.0), m1(0.0), v1(0.0), m1(0.0));
    }
    // With A=1 and Q=0 the oldest block equals the current state, so the
    // posterior is the precision-weighted fusion of prior and measurement.
    aug.correct_delayed(v1(2.0), m1(1.0), m1(1.0));
    const GaussianBelief top = aug.top();
    CHECK(top.mean(0) == Catch::Approx(1.0));
    CHECK(top.cov(0, 0) == Catch::Approx(0.5));
}

TEST_CASE("augmented covariance stays PSD over random runs") {
    GaussianBelief b;
    b.mean = (Eigen::VectorXd(2) << 1.0, -0.5).finished();
    b.cov = (Eigen::MatrixXd(2, 2) << 0.4, 0.1, 0.1, 0.3).finished();
    test::AugmentedKf aug(b, 4);
    RandomStream rng(10);
    const Eigen::MatrixXd A =
        (Eigen::MatrixXd(2, 2) << 0.95, 0.1, -0.1, 0.95).finished();
    const Eigen::MatrixXd Q =
        (Eigen::MatrixXd(2, 2) << 0.05, 0.0, 0.0, 0.05).finished();
    for (int k = 0; k < 100; ++k) {
        aug.predict(A, Eigen::MatrixXd::Zero(2, 1), v1(0.0), Q);
        if (k % 4 == 0 && k >= 4) {
            const Eigen::VectorXd z =
                (Eigen::VectorXd(2) << rng.next_gaussian(), rng.next_gaussian())
                    .finished();
            aug.correct_delayed(z, Eigen::MatrixXd::Identity(2, 2),
                                0.3 * Eigen::MatrixXd::Identity(2, 2));
        }
        CHECK(min_eigenvalue(aug.full_cov()) >= -1e-10);
        CHECK(max_asymmetry(aug.full_cov()) < 1e-12);
    }
}

TEST_CASE("finite differences recover a linear map exactly") {
    Eigen::MatrixXd M(2, 3);
    M << 1.0, -2.0, 0.5, 3.0, 0.25, -1.5;
    const auto fn = [&M](const Eigen::VectorXd& x) -> Eigen::VectorXd { return M * x; };
    const Eigen::MatrixXd J =
        test::finite_diff_jacobian(fn, Eigen::Vector3d(0.3, -0.7, 1.1), 1e-5);
    CHECK((J - M).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("epsilon sweep shows the central-difference error plateau") {
    const auto fn = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return v1(std::sin(x(0)) * std::exp(0.5 * x(0)));
    };
    const Eigen::VectorXd p = v1(0.8);
    const double exact = (std::cos(0.8) + 0.5 * std::sin(0.8)) * std::exp(0.4);
    double worst = 0.0;
    for (double eps : {1e-4, 1e-5, 1e-6, 1e-7}) {
        const double err =
            std::abs(test::finite_diff_jacobian(fn, p, eps)(0, 0) - exact);
        worst = std::max(worst, err);
    }
    CHECK(worst < 1e-6);  // well-conditioned derivative: no blow-up across the sweep
    CHECK_THROWS_AS(test::finite_diff_jacobian(fn, p, 1e-2), std::invalid_argument);
}
