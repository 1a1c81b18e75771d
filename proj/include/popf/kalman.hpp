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

#ifndef POPF_KALMAN_HPP_
#define POPF_KALMAN_HPP_

#include <Eigen/Dense>
#include <stdexcept>

#include "popf/belief.hpp"

namespace popf {

/// Linear prediction: mean <- A*mean + B*u, cov <- A*cov*A^T + Q_eff.
inline GaussianBelief kf_predict(const GaussianBelief& belief, const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B, const Eigen::VectorXd& u,
                                 const Eigen::MatrixXd& Q_eff) {
    const Eigen::Index d = belief.dim();
    if (A.rows() != d || A.cols() != d || B.rows() != d || B.cols() != u.size() ||
        Q_eff.rows() != d || Q_eff.cols() != d) {
        throw std::invalid_argument("kf_predict: dimension mismatch");
    }
    GaussianBelief out;
    out.mean = A * belief.mean + B * u;
    out.cov = symmetrize(A * belief.cov * A.transpose() + Q_eff);
    return out;
}

/// Standard correction with gain K = P*H^T*(H*P*H^T + R)^-1; the innovation
/// covariance is inverted by Cholesky and a singular one raises NumericError.
inline GaussianBelief kf_correct(const GaussianBelief& belief, const Eigen::MatrixXd& H,
                                 const Eigen::VectorXd& z, const Eigen::MatrixXd& R_eff) {
    const Eigen::Index d = belief.dim();
    const Eigen::Index q = H.rows();
    if (H.cols() != d || z.size() != q || R_eff.rows() != q || R_eff.cols() != q) {
        throw std::invalid_argument("kf_correct: dimension mismatch");
    }
    const Eigen::MatrixXd S = symmetrize(H * belief.cov * H.transpose() + R_eff);
    const Eigen::MatrixXd K = solve_spd(S, H * belief.cov, "kf_correct").transpose();
    GaussianBelief out;
    out.mean = belief.mean + K * (z - H * belief.mean);
    out.cov = symmetrize((Eigen::MatrixXd::Identity(d, d) - K * H) * belief.cov);
    return out;
}

}  // namespace popf

#endif  // POPF_KALMAN_HPP_
