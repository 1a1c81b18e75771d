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

#ifndef POPF_BELIEF_HPP_
#define POPF_BELIEF_HPP_

#include <Eigen/Dense>

#include "popf/errors.hpp"

namespace popf {

/// Gaussian state estimate: mean and covariance of one filter epoch.
struct GaussianBelief {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    Eigen::Index dim() const { return mean.size(); }
};

/// (M + M^T) / 2, exactly symmetric in floating point.
template <typename Derived>
Eigen::MatrixXd symmetrize(const Eigen::MatrixBase<Derived>& M) {
    return 0.5 * (M + M.transpose());
}

inline double max_asymmetry(const Eigen::MatrixXd& M) {
    return (M - M.transpose()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(M));
    return es.eigenvalues().minCoeff();
}

/// Solves S * X = B for symmetric positive definite S via Cholesky; on failure
/// throws NumericError carrying a condition estimate of S.
inline Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& S, const Eigen::MatrixXd& B,
                                 const char* context) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(S));
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
        const double cond = (lmin > 0.0) ? lmax / lmin
                                         : std::numeric_limits<double>::infinity();
        throw NumericError(std::string(context) +
                               ": innovation covariance not positive definite",
                           cond);
    }
    return llt.solve(B);
}

}  // namespace popf

#endif  // POPF_BELIEF_HPP_
