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

#ifndef POPF_ROBOT_FILTER_HPP_
#define POPF_ROBOT_FILTER_HPP_

#include <Eigen/Dense>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>

#include "popf/angles.hpp"
#include "popf/belief.hpp"
#include "popf/errors.hpp"
#include "popf/model.hpp"
#include "popf/types.hpp"

namespace popf {

/// Pose estimate with a 3x3 covariance.
struct RobotBelief {
    RobotState mean;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

namespace detail {

/// Standard full-pose fusion (H = I) with a wrapped heading innovation.
/// Shared by the delayed filter and the naive baseline so that both reduce to
/// the same arithmetic when no delay is present.
inline void fuse_pose(RobotBelief& b, const Eigen::Vector3d& z, const Eigen::Matrix3d& R,
                      Eigen::Matrix3d* gain_out = nullptr) {
    const Eigen::Matrix3d S = symmetrize(b.cov + R);
    Eigen::LLT<Eigen::Matrix3d> llt(S);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
        throw NumericError("fuse_pose: innovation covariance not positive definite",
                           lmin > 0.0 ? lmax / lmin
                                      : std::numeric_limits<double>::infinity());
    }
    const Eigen::Matrix3d K = llt.solve(b.cov).transpose();
    Eigen::Vector3d innov = z - b.mean.as_vector();
    innov(2) = wrap_angle(innov(2));
    Eigen::Vector3d mean = b.mean.as_vector() + K * innov;
    mean(2) = wrap_angle(mean(2));
    b.mean = RobotState::from_vector(mean);
    b.cov = symmetrize((Eigen::Matrix3d::Identity() - K) * b.cov);
    if (gain_out != nullptr) *gain_out = K;
}

/// EKF prediction of a pose belief through one commanded transition.
inline void predict_pose(RobotBelief& b, const ControlCommand& cmd,
                         const RobotGeometry& geom, const Eigen::Matrix2d& Q,
                         Eigen::Matrix3d* A_out = nullptr) {
    const Eigen::Matrix3d A = jacobian_A(b.mean, cmd, geom);
    const Eigen::Matrix<double, 3, 2> W = jacobian_W(b.mean, geom);
    b.mean = step_kinematics(b.mean, cmd, WheelNoise{}, geom);
    b.cov = symmetrize(A * b.cov * A.transpose() + W * Q * W.transpose());
    if (A_out != nullptr) *A_out = A;
}

}  // namespace detail

/// Per-step record of the robot filter; the applied command is kept so that
/// the epoch track and the rebuild pass can re-run the transition, and A is
/// refreshed with the linearization around the best mean seen for that step.
struct RobotHistoryRecord {
    long step = 0;
    ControlCommand cmd;
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d K = Eigen::Matrix3d::Zero();  // at-epoch gain, zero if none
    Eigen::Vector3d x_prior = Eigen::Vector3d::Zero();
    Eigen::Matrix3d P_prior = Eigen::Matrix3d::Zero();
    bool corrected = false;
    bool has_transition = false;
};

/// Delayed-measurement EKF for the unicycle (H = V = I).
///
/// Identical structure to DelayedKalmanFilter, with the linear pieces replaced
/// by the nonlinear kinematics and its Jacobians: each arriving measurement is
/// fused at its own epoch s = k - m with the standard gain, and the
/// current-time belief is rebuilt by re-running the buffered commands from the
/// corrected epoch, re-linearizing along the way. That rebuild realizes the
/// delayed-gain form K_k = M* K_s* with M* the product of the transition
/// Jacobians over [s, k).
class RobotPopfFilter {
public:
    RobotPopfFilter(RobotBelief initial, int measurement_delay, RobotGeometry geom,
                    Eigen::Matrix2d Q, Eigen::Matrix3d R_meas)
        : m_(measurement_delay), geom_(geom), Q_(std::move(Q)), R_(std::move(R_meas)),
          belief_(std::move(initial)), epoch_belief_(belief_) {
        if (m_ < 0) throw ConfigError("RobotPopfFilter: delay must be >= 0");
        geom_.validate();
        belief_.cov = symmetrize(belief_.cov);
        epoch_belief_.cov = belief_.cov;
    }

    /// Mirrors the plant transition driven by the command applied this step.
    void predict(const ControlCommand& applied) {
        RobotHistoryRecord& rec = ensure_record(k_);
        rec.cmd = applied;
        rec.has_transition = true;
        detail::predict_pose(belief_, applied, geom_, Q_, &rec.A);
        ++k_;
        prune();
    }

    /// Fuses the pose measurement taken at epoch k - m; false during warmup.
    bool correct(const Eigen::Vector3d& z) {
        const long s = k_ - m_;
        if (s < 0) return false;
        if (s < epoch_) {
            throw ProtocolError("RobotPopfFilter: measurement older than the fused epoch");
        }
        while (epoch_ < s) {
            RobotHistoryRecord& rec = ensure_record(epoch_);
            detail::predict_pose(epoch_belief_, rec.cmd, geom_, Q_, &rec.A);
            ++epoch_;
        }
        RobotHistoryRecord& rs = ensure_record(s);
        rs.x_prior = epoch_belief_.mean.as_vector();
        rs.P_prior = epoch_belief_.cov;
        Eigen::Matrix3d Ks;
        detail::fuse_pose(epoch_belief_, z, R_, &Ks);
        rs.K = Ks;
        rs.corrected = true;
        // Rebuild the current-time belief, refreshing the linearization.
        RobotBelief cur = epoch_belief_;
        Eigen::Matrix3d mstar = Eigen::Matrix3d::Identity();
        for (long t = s; t < k_; ++t) {
            RobotHistoryRecord& rec = ensure_record(t);
            detail::predict_pose(cur, rec.cmd, geom_, Q_, &rec.A);
            mstar = rec.A * mstar;
        }
        belief_ = cur;
        last_mstar_ = mstar;
        last_gain_ = mstar * Ks;
        return true;
    }

    const RobotBelief& belief() const { return belief_; }
    const RobotBelief& epoch_belief() const { return epoch_belief_; }
    long step() const { return k_; }
    long epoch() const { return epoch_; }
    const std::deque<RobotHistoryRecord>& history() const { return history_; }
    const Eigen::Matrix3d& last_gain() const { return last_gain_; }
    const Eigen::Matrix3d& last_mstar() const { return last_mstar_; }

private:
    RobotHistoryRecord& ensure_record(long step) {
        if (history_.empty()) {
            history_.emplace_back();
            history_.back().step = step;
            return history_.back();
        }
        const long base = history_.front().step;
        if (step < base) {
            throw WarmupError("RobotPopfFilter: history for step " +
                              std::to_string(step) + " already discarded");
        }
        while (step - base >= static_cast<long>(history_.size())) {
            const long next = base + static_cast<long>(history_.size());
            history_.emplace_back();
            history_.back().step = next;
        }
        return history_[static_cast<size_t>(step - base)];
    }

    void prune() {
        while (!history_.empty() && history_.front().step < epoch_ - 1 &&
               static_cast<long>(history_.size()) > m_ + 2) {
            history_.pop_front();
        }
    }

    int m_;
    RobotGeometry geom_;
    Eigen::Matrix2d Q_;
    Eigen::Matrix3d R_;
    long k_ = 0;
    long epoch_ = 0;
    RobotBelief belief_;
    RobotBelief epoch_belief_;
    std::deque<RobotHistoryRecord> history_;
    Eigen::Matrix3d last_gain_ = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d last_mstar_ = Eigen::Matrix3d::Identity();
};

/// Baseline EKF that fuses the delayed measurement as if it were current.
class RobotNaiveEkf {
public:
    RobotNaiveEkf(RobotBelief initial, RobotGeometry geom, Eigen::Matrix2d Q,
                  Eigen::Matrix3d R_meas)
        : geom_(geom), Q_(std::move(Q)), R_(std::move(R_meas)),
          belief_(std::move(initial)) {
        geom_.validate();
        belief_.cov = symmetrize(belief_.cov);
    }

    void predict(const ControlCommand& applied) {
        detail::predict_pose(belief_, applied, geom_, Q_);
    }

    void correct(const Eigen::Vector3d& z_delayed) {
        detail::fuse_pose(belief_, z_delayed, R_);
    }

    const RobotBelief& belief() const { return belief_; }

private:
    RobotGeometry geom_;
    Eigen::Matrix2d Q_;
    Eigen::Matrix3d R_;
    RobotBelief belief_;
};

/// Noise-free rollout of the kinematics over the commands the plant will apply
/// at steps k..k+n-1; returns the pose the controller should command against.
inline RobotState popf_extrapolate(const RobotState& mean,
                                   std::span<const ControlCommand> schedule,
                                   const RobotGeometry& geom) {
    RobotState cur = mean;
    for (const ControlCommand& cmd : schedule) {
        cur = step_kinematics(cur, cmd, WheelNoise{}, geom);
    }
    return cur;
}

}  // namespace popf

#endif  // POPF_ROBOT_FILTER_HPP_
