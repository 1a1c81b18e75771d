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

#ifndef POPF_METRICS_HPP_
#define POPF_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "popf/angles.hpp"
#include "popf/scenario.hpp"

namespace popf {

enum class Axis { x, y, theta };

/// Root-mean-square estimate-vs-truth error on one axis, over the rows that
/// carry an estimate; heading differences are wrapped before squaring.
inline double rmse(const Trace& trace, Axis axis) {
    if (trace.rows.empty()) throw std::invalid_argument("rmse: empty trace");
    double acc = 0.0;
    long count = 0;
    for (const TraceRow& row : trace.rows) {
        if (!row.estimate) continue;
        double e = 0.0;
        switch (axis) {
            case Axis::x: e = row.estimate->x - row.truth.x; break;
            case Axis::y: e = row.estimate->y - row.truth.y; break;
            case Axis::theta: e = angle_diff(row.estimate->theta, row.truth.theta); break;
        }
        acc += e * e;
        ++count;
    }
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(acc / static_cast<double>(count));
}

struct ConvergenceResult {
    bool converged = false;
    std::optional<double> settle_time;  // seconds; absent if never settled
};

/// Converged iff rho < rho_tol and |theta - goal.theta| < theta_tol over the
/// final 10% of steps; settle time is the first instant after which the
/// condition holds to the end of the trace.
inline ConvergenceResult convergence_check(const Trace& trace, double rho_tol,
                                           double theta_tol) {
    if (trace.rows.empty()) {
        throw std::invalid_argument("convergence_check: empty trace");
    }
    const size_t total = trace.rows.size();
    std::vector<bool> ok(total);
    for (size_t i = 0; i < total; ++i) {
        const TraceRow& row = trace.rows[i];
        const double dth =
            std::abs(angle_diff(row.truth.theta, trace.config.goal.theta));
        ok[i] = row.polar.rho < rho_tol && dth < theta_tol;
    }
    size_t first_settled = total;
    for (size_t i = total; i-- > 0;) {
        if (!ok[i]) break;
        first_settled = i;
    }
    const size_t tail_start = total - std::max<size_t>(1, total / 10);
    ConvergenceResult result;
    result.converged = first_settled <= tail_start;
    if (first_settled < total) {
        result.settle_time = trace.rows[first_settled].time;
    }
    return result;
}

/// Default convergence tolerances: 0.1 m / 0.1 rad for noisy runs and
/// 0.01 / 0.01 for noiseless ones.
inline std::pair<double, double> default_tolerances(const Trace& trace) {
    return trace.config.noise_enabled ? std::pair{0.1, 0.1} : std::pair{0.01, 0.01};
}

struct MetricsSummary {
    double rmse_x = std::numeric_limits<double>::quiet_NaN();
    double rmse_y = std::numeric_limits<double>::quiet_NaN();
    double rmse_theta = std::numeric_limits<double>::quiet_NaN();
    double final_rho = 0.0;
    double final_abs_theta = 0.0;
    double final_abs_v = 0.0;
    double final_abs_omega = 0.0;
    double tail_mean_abs_omega = 0.0;  // mean |omega sent| over the final 10%
    bool converged = false;
    std::optional<double> settle_time;
};

inline MetricsSummary summarize(const Trace& trace, double rho_tol, double theta_tol) {
    if (trace.rows.empty()) throw std::invalid_argument("summarize: empty trace");
    MetricsSummary s;
    s.rmse_x = rmse(trace, Axis::x);
    s.rmse_y = rmse(trace, Axis::y);
    s.rmse_theta = rmse(trace, Axis::theta);
    const TraceRow& last = trace.rows.back();
    s.final_rho = last.polar.rho;
    s.final_abs_theta = std::abs(angle_diff(last.truth.theta, trace.config.goal.theta));
    s.final_abs_v = std::abs(last.cmd_sent.v);
    s.final_abs_omega = std::abs(last.cmd_sent.omega);
    const size_t total = trace.rows.size();
    const size_t tail_start = total - std::max<size_t>(1, total / 10);
    double acc = 0.0;
    for (size_t i = tail_start; i < total; ++i) {
        acc += std::abs(trace.rows[i].cmd_sent.omega);
    }
    s.tail_mean_abs_omega = acc / static_cast<double>(total - tail_start);
    const ConvergenceResult conv = convergence_check(trace, rho_tol, theta_tol);
    s.converged = conv.converged;
    s.settle_time = conv.settle_time;
    return s;
}

inline MetricsSummary summarize(const Trace& trace) {
    const auto [rho_tol, theta_tol] = default_tolerances(trace);
    return summarize(trace, rho_tol, theta_tol);
}

struct MonteCarloSummary {
    std::vector<uint64_t> seeds;
    std::vector<MetricsSummary> per_seed;
    double median_final_rho = 0.0;
    double median_final_abs_theta = 0.0;
    double median_rmse_x = 0.0;
    double median_rmse_y = 0.0;
    double median_rmse_theta = 0.0;
    long converged_count = 0;
};

namespace detail {
inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}
}  // namespace detail

/// Runs the scenario once per seed and aggregates the per-seed metrics.
/// Deterministic given the seed list.
inline MonteCarloSummary run_monte_carlo(const ScenarioConfig& config,
                                         const std::vector<uint64_t>& seeds) {
    if (seeds.empty()) throw ConfigError("run_monte_carlo: need at least one seed");
    MonteCarloSummary out;
    out.seeds = seeds;
    std::vector<double> rho, th, rx, ry, rt;
    for (uint64_t seed : seeds) {
        ScenarioConfig cfg = config;
        cfg.seed = seed;
        const Trace trace = run_scenario(cfg);
        const MetricsSummary s = summarize(trace);
        out.per_seed.push_back(s);
        rho.push_back(s.final_rho);
        th.push_back(s.final_abs_theta);
        rx.push_back(s.rmse_x);
        ry.push_back(s.rmse_y);
        rt.push_back(s.rmse_theta);
        if (s.converged) ++out.converged_count;
    }
    out.median_final_rho = detail::median(rho);
    out.median_final_abs_theta = detail::median(th);
    out.median_rmse_x = detail::median(rx);
    out.median_rmse_y = detail::median(ry);
    out.median_rmse_theta = detail::median(rt);
    return out;
}

}  // namespace popf

#endif  // POPF_METRICS_HPP_
