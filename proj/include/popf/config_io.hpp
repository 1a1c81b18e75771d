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

#ifndef POPF_CONFIG_IO_HPP_
#define POPF_CONFIG_IO_HPP_

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "popf/errors.hpp"
#include "popf/metrics.hpp"
#include "popf/scenario.hpp"

namespace popf {

/// Flat `key = value` document with '#' comments; keys are dotted paths and
/// matrix values are row-major number lists.
using KeyValueMap = std::map<std::string, std::string>;

namespace cfg {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline KeyValueMap parse_key_values(std::istream& in) {
    KeyValueMap kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value', got '" + line + "'", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (value.empty()) throw ParseError("empty value for key '" + key + "'", line_no);
        if (kv.count(key) != 0) {
            throw ParseError("duplicate key '" + key + "'", line_no);
        }
        kv[key] = value;
    }
    return kv;
}

/// Full-precision decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& value) {
    size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
    if (pos != value.size()) {
        throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
    }
    return out;
}

inline long parse_long(const std::string& key, const std::string& value) {
    const double d = parse_double(key, value);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
    return l;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value,
                                      size_t expected) {
    std::string cleaned = value;
    for (char& c : cleaned) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(cleaned);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(key, tok));
    if (out.size() != expected) {
        throw ConfigError("key '" + key + "': expected " + std::to_string(expected) +
                          " numbers, got " + std::to_string(out.size()));
    }
    return out;
}

}  // namespace cfg

/// The recognized config keys. Belief and controller-policy keys are optional
/// with documented defaults; everything else is required.
inline ScenarioConfig config_from_key_values(const KeyValueMap& kv) {
    static const std::vector<std::string> required = {
        "geom.wheel_radius", "geom.wheel_base", "geom.sample_time",
        "gains.gamma", "gains.lambda", "gains.h",
        "delays.n", "delays.m",
        "noise.Q", "noise.R",
        "initial_state.x", "initial_state.y", "initial_state.theta",
        "goal.x", "goal.y", "goal.theta",
        "estimator", "steps", "seed", "noise_enabled",
    };
    static const std::vector<std::string> optional = {
        "initial_belief.mean.x", "initial_belief.mean.y", "initial_belief.mean.theta",
        "initial_belief.cov",
        "controller.v_max", "controller.omega_max", "controller.deadband_rho",
        "controller.stop_rho", "controller.stop_theta",
    };
    for (const auto& [key, value] : kv) {
        const bool known =
            std::find(required.begin(), required.end(), key) != required.end() ||
            std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known) throw ConfigError("unknown key '" + key + "'");
    }
    for (const std::string& key : required) {
        if (kv.count(key) == 0) throw ConfigError("missing required key '" + key + "'");
    }
    const auto get = [&kv](const std::string& key) { return kv.at(key); };
    const auto num = [&](const std::string& key) {
        return cfg::parse_double(key, get(key));
    };

    ScenarioConfig c;
    c.geom.wheel_radius = num("geom.wheel_radius");
    c.geom.wheel_base = num("geom.wheel_base");
    c.geom.sample_time = num("geom.sample_time");
    c.gains.gamma = num("gains.gamma");
    c.gains.lambda = num("gains.lambda");
    c.gains.h = num("gains.h");
    c.delays.n = static_cast<int>(cfg::parse_long("delays.n", get("delays.n")));
    c.delays.m = static_cast<int>(cfg::parse_long("delays.m", get("delays.m")));
    {
        const auto q = cfg::parse_list("noise.Q", get("noise.Q"), 4);
        c.noise.Q << q[0], q[1], q[2], q[3];
        const auto r = cfg::parse_list("noise.R", get("noise.R"), 9);
        c.noise.R_meas << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
    }
    c.initial_state = {num("initial_state.x"), num("initial_state.y"),
                       num("initial_state.theta")};
    c.goal = {num("goal.x"), num("goal.y"), num("goal.theta")};
    const std::string est = get("estimator");
    if (est == "none") c.estimator = EstimatorKind::none;
    else if (est == "ekf_naive") c.estimator = EstimatorKind::ekf_naive;
    else if (est == "popf") c.estimator = EstimatorKind::popf;
    else throw ConfigError("key 'estimator': expected none|ekf_naive|popf, got '" +
                           est + "'");
    c.steps = cfg::parse_long("steps", get("steps"));
    c.seed = static_cast<uint64_t>(cfg::parse_long("seed", get("seed")));
    c.noise_enabled = cfg::parse_bool("noise_enabled", get("noise_enabled"));

    // Defaults: belief mean at the initial state, P0 = 0.5 * R.
    c.initial_belief.mean = c.initial_state;
    if (kv.count("initial_belief.mean.x") != 0) {
        c.initial_belief.mean = {num("initial_belief.mean.x"),
                                 num("initial_belief.mean.y"),
                                 num("initial_belief.mean.theta")};
    }
    if (kv.count("initial_belief.cov") != 0) {
        const auto p = cfg::parse_list("initial_belief.cov", get("initial_belief.cov"), 9);
        c.initial_belief.cov << p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8];
    } else {
        c.initial_belief.cov = 0.5 * c.noise.R_meas;
    }
    if (kv.count("controller.v_max") != 0) c.limits.v_max = num("controller.v_max");
    if (kv.count("controller.omega_max") != 0) {
        c.limits.omega_max = num("controller.omega_max");
    }
    if (kv.count("controller.deadband_rho") != 0) {
        c.limits.deadband_rho = num("controller.deadband_rho");
    }
    if (kv.count("controller.stop_rho") != 0) c.stop_rho = num("controller.stop_rho");
    if (kv.count("controller.stop_theta") != 0) {
        c.stop_theta = num("controller.stop_theta");
    }
    c.validate();
    return c;
}

inline KeyValueMap key_values_from_config(const ScenarioConfig& c) {
    KeyValueMap kv;
    const auto put = [&kv](const std::string& key, double v) {
        kv[key] = cfg::format_double(v);
    };
    put("geom.wheel_radius", c.geom.wheel_radius);
    put("geom.wheel_base", c.geom.wheel_base);
    put("geom.sample_time", c.geom.sample_time);
    put("gains.gamma", c.gains.gamma);
    put("gains.lambda", c.gains.lambda);
    put("gains.h", c.gains.h);
    kv["delays.n"] = std::to_string(c.delays.n);
    kv["delays.m"] = std::to_string(c.delays.m);
    const auto mat = [](const Eigen::MatrixXd& M) {
        std::string out;
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            for (Eigen::Index j = 0; j < M.cols(); ++j) {
                if (!out.empty()) out += ", ";
                out += cfg::format_double(M(i, j));
            }
        }
        return out;
    };
    kv["noise.Q"] = mat(c.noise.Q);
    kv["noise.R"] = mat(c.noise.R_meas);
    put("initial_state.x", c.initial_state.x);
    put("initial_state.y", c.initial_state.y);
    put("initial_state.theta", c.initial_state.theta);
    put("goal.x", c.goal.x);
    put("goal.y", c.goal.y);
    put("goal.theta", c.goal.theta);
    switch (c.estimator) {
        case EstimatorKind::none: kv["estimator"] = "none"; break;
        case EstimatorKind::ekf_naive: kv["estimator"] = "ekf_naive"; break;
        case EstimatorKind::popf: kv["estimator"] = "popf"; break;
    }
    kv["steps"] = std::to_string(c.steps);
    kv["seed"] = std::to_string(c.seed);
    kv["noise_enabled"] = c.noise_enabled ? "true" : "false";
    put("initial_belief.mean.x", c.initial_belief.mean.x);
    put("initial_belief.mean.y", c.initial_belief.mean.y);
    put("initial_belief.mean.theta", c.initial_belief.mean.theta);
    kv["initial_belief.cov"] = mat(c.initial_belief.cov);
    if (std::isfinite(c.limits.v_max)) put("controller.v_max", c.limits.v_max);
    if (std::isfinite(c.limits.omega_max)) put("controller.omega_max", c.limits.omega_max);
    if (c.limits.deadband_rho > 0.0) put("controller.deadband_rho", c.limits.deadband_rho);
    if (c.stop_rho > 0.0) {
        put("controller.stop_rho", c.stop_rho);
        put("controller.stop_theta", c.stop_theta);
    }
    return kv;
}

/// Applies `--set key=value` overrides on top of a parsed document; the merged
/// map is validated by the same path as a file.
inline void apply_overrides(KeyValueMap& kv, const std::vector<std::string>& sets) {
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + s + "': expected KEY=VALUE");
        }
        const std::string key = cfg::trim(s.substr(0, eq));
        const std::string value = cfg::trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("override '" + s + "': expected KEY=VALUE");
        }
        kv[key] = value;
    }
}

inline ScenarioConfig read_config(const std::string& path,
                                  const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    KeyValueMap kv = cfg::parse_key_values(in);
    apply_overrides(kv, overrides);
    return config_from_key_values(kv);
}

inline void write_key_values(const KeyValueMap& kv, std::ostream& out) {
    for (const auto& [key, value] : kv) {
        out << key << " = " << value << "\n";
    }
}

inline void write_config(const ScenarioConfig& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    write_key_values(key_values_from_config(c), out);
}

inline void write_metrics(const MetricsSummary& s, std::ostream& out) {
    const auto put = [&out](const char* key, double v) {
        out << key << " = " << cfg::format_double(v) << "\n";
    };
    put("rmse.x", s.rmse_x);
    put("rmse.y", s.rmse_y);
    put("rmse.theta", s.rmse_theta);
    put("final.rho", s.final_rho);
    put("final.abs_theta", s.final_abs_theta);
    put("final.abs_v", s.final_abs_v);
    put("final.abs_omega", s.final_abs_omega);
    put("tail_mean_abs_omega", s.tail_mean_abs_omega);
    out << "converged = " << (s.converged ? "true" : "false") << "\n";
    if (s.settle_time) {
        put("settle_time", *s.settle_time);
    }
}

}  // namespace popf

#endif  // POPF_CONFIG_IO_HPP_
