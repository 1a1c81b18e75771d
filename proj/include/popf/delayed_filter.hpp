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

#ifndef POPF_DELAYED_FILTER_HPP_
#define POPF_DELAYED_FILTER_HPP_

#include <Eigen/Dense>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>

#include "popf/belief.hpp"
#include "popf/errors.hpp"
#include "popf/kalman.hpp"

namespace popf {

/// Per-step bookkeeping for the delayed filter.
///
/// The record of step t carries two kinds of data:
///  - the transition t -> t+1 handed to predict() (A, B*u, Q_eff), and
///  - the epoch-t quantities of the measurement track: the prior (x_prior,
///    P_prior) the filter had at epoch t when z_t was processed, the gain K
///    applied to z_t and its measurement matrix H. Steps whose measurement
///    never arrived keep K = 0, so their factor in the gain product below
///    degenerates to A alone.
struct HistoryRecord {
    long step = 0;
    Eigen::MatrixXd A;        // transition matrix, state t -> t+1
    Eigen::VectorXd bu;       // control effect B*u of that transition
    Eigen::MatrixXd Q_eff;    // process noise of that transition
    Eigen::MatrixXd H;        // measurement matrix fused at epoch t (if any)
    Eigen::MatrixXd K;        // at-epoch gain (zero matrix if no correction ran)
    Eigen::VectorXd x_prior;  // prior mean at epoch t (filled when z_t is processed)
    Eigen::MatrixXd P_prior;  // prior covariance at epoch t
    bool corrected = false;
};

/// M* = prod_{i=1..m} A_{k-i} * (I - K_{k-i} H_{k-i}), ordered with i = 1
/// leftmost. Records with K = 0 contribute their A alone, and the factor of
/// the window's epoch (i = m, the step whose measurement the window serves)
/// is always its transition only: the gain recorded there belongs to the
/// fusion that ends at that epoch, not to the prior-to-prior map across the
/// window. m = 0 gives the identity.
inline Eigen::MatrixXd compute_mstar(const std::deque<HistoryRecord>& history, long k,
                                     int m) {
    Eigen::Index d = 0;
    for (const auto& rec : history) {
        if (rec.A.size() > 0) { d = rec.A.rows(); break; }
        if (rec.x_prior.size() > 0) { d = rec.x_prior.size(); break; }
    }
    if (d == 0) {
        throw std::invalid_argument("compute_mstar: history carries no dimensions");
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d);
    if (m == 0) return M;
    const long base = history.front().step;
    for (int i = 1; i <= m; ++i) {
        const long step = k - i;
        const long idx = step - base;
        if (idx < 0 || idx >= static_cast<long>(history.size())) {
            throw WarmupError("compute_mstar: missing history for step " +
                              std::to_string(step));
        }
        const HistoryRecord& rec = history[static_cast<size_t>(idx)];
        if (rec.A.size() == 0) {
            throw WarmupError("compute_mstar: record " + std::to_string(step) +
                              " has no transition");
        }
        Eigen::MatrixXd factor = rec.A;
        if (rec.corrected && rec.K.size() > 0) {
            factor = rec.A * (Eigen::MatrixXd::Identity(d, d) - rec.K * rec.H);
        }
        M = M * factor;
    }
    return M;
}

/// Kalman filter for a linear system whose measurements arrive a fixed m steps
/// late: z arriving at step k was taken at epoch s = k - m.
///
/// Measurements are processed in epoch order: the filter keeps a belief at the
/// newest fused epoch, fuses each arriving z_s there with the standard gain
/// K_s* computed from the epoch prior, and rebuilds the current-time belief by
/// re-running the buffered transitions s..k-1. For the current-time belief this
/// is algebraically the delayed-gain update
///
///   K_k  = M* K_s*,          M* = A_{k-1} ... A_s
///   x_k+ = x_k- + K_k (z - H x_s-)
///   P_k+ = P_k- - K_k H P_s- M*^T
///
/// since no epoch inside (s, k) has been corrected yet; both forms agree to
/// rounding and the rebuilt one is posted. With m = 0 the update is the
/// standard correction. The posterior matches the equivalent augmented-state
/// filter exactly for any arrival schedule.
class DelayedKalmanFilter {
public:
    DelayedKalmanFilter(GaussianBelief initial, int measurement_delay)
        : m_(measurement_delay), belief_(std::move(initial)), epoch_belief_(belief_) {
        if (m_ < 0) throw ConfigError("DelayedKalmanFilter: delay must be >= 0");
        belief_.cov = symmetrize(belief_.cov);
        epoch_belief_.cov = belief_.cov;
    }

    /// Advances the current-time belief through one transition and buffers it.
    void predict(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                 const Eigen::VectorXd& u, const Eigen::MatrixXd& Q_eff) {
        belief_ = kf_predict(belief_, A, B, u, Q_eff);
        HistoryRecord& rec = ensure_record(k_);
        rec.A = A;
        rec.bu = B * u;
        rec.Q_eff = Q_eff;
        ++k_;
        prune();
    }

    /// Fuses the measurement taken at epoch k - m. Returns false during warmup
    /// (epoch before the initial belief), leaving the prediction-only belief.
    bool correct(const Eigen::VectorXd& z, const Eigen::MatrixXd& H,
                 const Eigen::MatrixXd& R) {
        const long s = k_ - m_;
        if (s < 0) {
            return false;
        }
        if (s < epoch_) {
            throw ProtocolError("DelayedKalmanFilter: measurement older than the "
                                "fused epoch");
        }
        // Bring the epoch belief forward to s through the buffered transitions.
        while (epoch_ < s) {
            const HistoryRecord& rec = ensure_record(epoch_);
            epoch_belief_.mean = rec.A * epoch_belief_.mean + rec.bu;
            epoch_belief_.cov =
                symmetrize(rec.A * epoch_belief_.cov * rec.A.transpose() + rec.Q_eff);
            ++epoch_;
        }
        // Standard at-epoch correction; keep the prior and gain for M*.
        const Eigen::Index d = belief_.dim();
        HistoryRecord& rs = ensure_record(s);
        rs.x_prior = epoch_belief_.mean;
        rs.P_prior = epoch_belief_.cov;
        const Eigen::MatrixXd S = symmetrize(H * epoch_belief_.cov * H.transpose() + R);
        const Eigen::MatrixXd Ks =
            solve_spd(S, H * epoch_belief_.cov, "DelayedKalmanFilter::correct")
                .transpose();
        const Eigen::VectorXd innov = z - H * epoch_belief_.mean;
        epoch_belief_.mean += Ks * innov;
        epoch_belief_.cov =
            symmetrize((Eigen::MatrixXd::Identity(d, d) - Ks * H) * epoch_belief_.cov);
        rs.H = H;
        rs.K = Ks;
        rs.corrected = true;
        // Rebuild the current-time belief from the corrected epoch.
        GaussianBelief cur = epoch_belief_;
        Eigen::MatrixXd mstar = Eigen::MatrixXd::Identity(d, d);
        for (long t = s; t < k_; ++t) {
            const HistoryRecord& rec = ensure_record(t);
            cur.mean = rec.A * cur.mean + rec.bu;
            cur.cov = symmetrize(rec.A * cur.cov * rec.A.transpose() + rec.Q_eff);
            mstar = rec.A * mstar;
        }
        belief_ = std::move(cur);
        last_mstar_ = mstar;
        last_gain_ = mstar * Ks;
        return true;
    }

    const GaussianBelief& belief() const { return belief_; }
    const GaussianBelief& epoch_belief() const { return epoch_belief_; }
    long step() const { return k_; }
    long epoch() const { return epoch_; }
    int delay() const { return m_; }
    const std::deque<HistoryRecord>& history() const { return history_; }

    /// Gain and transition product of the most recent correction.
    const Eigen::MatrixXd& last_gain() const { return last_gain_; }
    const Eigen::MatrixXd& last_mstar() const { return last_mstar_; }

private:
    HistoryRecord& ensure_record(long step) {
        if (history_.empty()) {
            HistoryRecord rec;
            rec.step = step;
            rec.K = Eigen::MatrixXd::Zero(belief_.dim(), belief_.dim());
            history_.push_back(std::move(rec));
            return history_.back();
        }
        const long base = history_.front().step;
        if (step < base) {
            throw WarmupError("DelayedKalmanFilter: history for step " +
                              std::to_string(step) + " already discarded");
        }
        while (step - base >= static_cast<long>(history_.size())) {
            HistoryRecord rec;
            rec.step = base + static_cast<long>(history_.size());
            rec.K = Eigen::MatrixXd::Zero(belief_.dim(), belief_.dim());
            history_.push_back(std::move(rec));
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
    long k_ = 0;
    long epoch_ = 0;
    GaussianBelief belief_;
    GaussianBelief epoch_belief_;
    std::deque<HistoryRecord> history_;
    Eigen::MatrixXd last_gain_;
    Eigen::MatrixXd last_mstar_;
};

}  // namespace popf

#endif  // POPF_DELAYED_FILTER_HPP_
