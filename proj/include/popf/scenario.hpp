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

#ifndef POPF_SCENARIO_HPP_
#define POPF_SCENARIO_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "popf/channel.hpp"
#include "popf/controller.hpp"
#include "popf/model.hpp"
#include "popf/rng.hpp"
#include "popf/robot_filter.hpp"
#include "popf/types.hpp"

namespace popf {

enum class EstimatorKind { none, ekf_naive, popf };

/// Full description of one closed-loop experiment.
struct ScenarioConfig {
    RobotGeometry geom;
    ControllerGains gains;
    ControllerLimits limits;
    double stop_rho = 0.0;    // goal-reached latch radius; 0 disables the latch
    double stop_theta = 0.0;  // heading tolerance of the latch
    DelayConfig delays;
    NoiseModel noise;
    RobotState initial_state;
    RobotBelief initial_belief;
    RobotState goal;
    EstimatorKind estimator = EstimatorKind::none;
    long steps = 3000;
    uint64_t seed = 0;
    bool noise_enabled = true;

    void validate() const {
        geom.validate();
        gains.validate();
        limits.validate();
        delays.validate();
        noise.validate();
        if (steps <= 0) throw ConfigError("ScenarioConfig: steps must be > 0");
        if (stop_rho < 0.0 || stop_theta < 0.0) {
            throw ConfigError("ScenarioConfig: stop_rho/stop_theta must be >= 0");
        }
        if (stop_rho > 0.0 && !(stop_theta > 0.0)) {
            throw ConfigError("ScenarioConfig: stop_theta must be > 0 when the "
                              "stop latch is enabled");
        }
        if (!initial_state.finite() || !goal.finite() ||
            !initial_belief.mean.finite()) {
            throw ConfigError("ScenarioConfig: poses must be finite");
        }
        if (!detail::symmetric_psd(initial_belief.cov)) {
            throw ConfigError("ScenarioConfig: initial belief covariance must be "
                              "symmetric PSD");
        }
    }
};

/// One step of the closed loop as logged by the runner. The polar error is the
/// true pose against the goal; the predicted pose is the one the controller
/// acted on (extrapolated for the delayed filter, the delayed measurement for
/// raw feedback).
struct TraceRow {
    long step = 0;
    double time = 0.0;
    RobotState truth;
    std::optional<RobotState> estimate;   // current-state estimate, if any
    std::optional<RobotState> predicted;  // pose the controller used
    ControlCommand cmd_sent;
    ControlCommand cmd_applied;           // applied at the plant this step
    PolarError polar;                     // truth vs goal
    std::optional<Eigen::Vector3d> measurement;  // delayed z received this step
    std::optional<Eigen::Vector3d> est_error;    // estimate - truth, theta wrapped
};

/// Scenario output: the rows plus the resolved config (enough to re-run) and
/// worst-case covariance hygiene over the run (filters only).
struct Trace {
    ScenarioConfig config;
    std::vector<TraceRow> rows;
    std::optional<double> cov_max_asymmetry;
    std::optional<double> cov_min_eigenvalue;
};

/// Zero-mean draws of the wheel-speed and measurement noise; substreams keep
/// the two sequences independent and the whole run reproducible per seed.
class NoiseSampler {
public:
    NoiseSampler(const NoiseModel& noise, uint64_t seed, bool enabled)
        : enabled_(enabled), wheel_stream_(RandomStream::substream(seed, 1)),
          meas_stream_(RandomStream::substream(seed, 2)), wheel_(noise.Q),
          meas_(noise.R_meas) {}

    std::pair<WheelNoise, Eigen::Vector3d> sample() {
        if (!enabled_) return {WheelNoise{}, Eigen::Vector3d::Zero()};
        const Eigen::VectorXd w = wheel_.sample(wheel_stream_);
        return {WheelNoise{w(0), w(1)}, meas_.sample(meas_stream_)};
    }

private:
    bool enabled_;
    RandomStream wheel_stream_;
    RandomStream meas_stream_;
    GaussianVectorSampler wheel_;
    GaussianVectorSampler meas_;
};

namespace detail {

inline void track_hygiene(const Eigen::Matrix3d& cov, double& worst_asym,
                          double& worst_eig) {
    worst_asym = std::max(worst_asym, max_asymmetry(cov));
    worst_eig = std::min(worst_eig, min_eigenvalue(cov));
}

}  // namespace detail

/// Runs the closed loop of one scenario. Per step k:
///   1. the plant applies the command arriving this step (zero during warmup)
///      with sampled wheel noise,
///   2. the sensor measures the new pose and pushes it into the measurement
///      channel (delay m),
///   3. the estimator predicts with the known applied command, fuses the
///      popped delayed measurement if one arrived and extrapolates across the
///      control delay,
///   4. the controller commands against the extrapolated pose (or the raw
///      delayed measurement when no estimator runs) and pushes into the
///      control channel (delay n),
///   5. the row is logged.
inline Trace run_scenario(const ScenarioConfig& config) {
    config.validate();
    const long n = config.delays.n;

    Trace trace;
    trace.config = config;
    trace.rows.reserve(static_cast<size_t>(config.steps));

    RobotState x = config.initial_state;
    NoiseSampler sampler(config.noise, config.seed, config.noise_enabled);
    DelayChannel<ControlCommand> ctrl_chan(config.delays.n);
    DelayChannel<Eigen::Vector3d> meas_chan(config.delays.m);

    // Commands indexed by plant application time; zero until a sender exists.
    std::vector<ControlCommand> app_schedule(static_cast<size_t>(config.steps + n + 1));

    std::optional<RobotPopfFilter> popf;
    std::optional<RobotNaiveEkf> naive;
    if (config.estimator == EstimatorKind::popf) {
        popf.emplace(config.initial_belief, config.delays.m, config.geom,
                     config.noise.Q, config.noise.R_meas);
    } else if (config.estimator == EstimatorKind::ekf_naive) {
        naive.emplace(config.initial_belief, config.geom, config.noise.Q,
                      config.noise.R_meas);
    }

    double worst_asym = 0.0;
    double worst_eig = std::numeric_limits<double>::infinity();
    ControlCommand pending;  // command the plant applies during the next transition
    bool latched = false;

    for (long k = 0; k < config.steps; ++k) {
        const auto [wheel_noise, meas_noise] = sampler.sample();
        if (k > 0) {
            x = step_kinematics(x, pending, wheel_noise, config.geom);
        }
        const Eigen::Vector3d z = measure(x, meas_noise);
        meas_chan.push(z, k);

        if (k > 0) {
            if (popf) popf->predict(pending);
            if (naive) naive->predict(pending);
        }
        const std::optional<Eigen::Vector3d> delayed_z = meas_chan.pop(k);

        std::optional<RobotState> estimate;
        std::optional<RobotState> controller_pose;
        if (popf) {
            if (delayed_z) popf->correct(*delayed_z);
            estimate = popf->belief().mean;
            const auto first = app_schedule.begin() + k;
            controller_pose = popf_extrapolate(
                *estimate, std::span<const ControlCommand>(first, first + n),
                config.geom);
            detail::track_hygiene(popf->belief().cov, worst_asym, worst_eig);
            detail::track_hygiene(popf->epoch_belief().cov, worst_asym, worst_eig);
        } else if (naive) {
            if (delayed_z) naive->correct(*delayed_z);
            estimate = naive->belief().mean;
            controller_pose = estimate;  // fused as if current; no extrapolation
            detail::track_hygiene(naive->belief().cov, worst_asym, worst_eig);
        } else if (delayed_z) {
            estimate = RobotState{(*delayed_z)(0), (*delayed_z)(1), (*delayed_z)(2)};
            controller_pose = estimate;
        }

        ControlCommand cmd;
        if (controller_pose && !latched) {
            const PolarError err = polar_transform(*controller_pose, config.goal);
            if (config.stop_rho > 0.0 && err.rho < config.stop_rho &&
                std::abs(angle_diff(controller_pose->theta, config.goal.theta)) <
                    config.stop_theta) {
                latched = true;
            } else {
                cmd = stabilize(err, config.gains, config.limits);
            }
        }
        ctrl_chan.push(cmd, k);
        app_schedule[static_cast<size_t>(k + n)] = cmd;
        pending = ctrl_chan.pop(k).value_or(ControlCommand{});

        TraceRow row;
        row.step = k;
        row.time = static_cast<double>(k) * config.geom.sample_time;
        row.truth = x;
        row.estimate = estimate;
        row.predicted = controller_pose;
        row.cmd_sent = cmd;
        row.cmd_applied = pending;
        row.polar = polar_transform(x, config.goal);
        row.measurement = delayed_z;
        if (estimate) {
            Eigen::Vector3d e = estimate->as_vector() - x.as_vector();
            e(2) = angle_diff(estimate->theta, x.theta);
            row.est_error = e;
        }
        trace.rows.push_back(std::move(row));
    }

    if (popf || naive) {
        trace.cov_max_asymmetry = worst_asym;
        trace.cov_min_eigenvalue = worst_eig;
    }
    return trace;
}

}  // namespace popf

#endif  // POPF_SCENARIO_HPP_
