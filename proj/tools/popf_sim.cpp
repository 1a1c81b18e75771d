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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "popf/config_io.hpp"
#include "popf/metrics.hpp"
#include "popf/scenario.hpp"
#include "popf/trace_csv.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::optional<long> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--set", args.sets, "override KEY=VALUE (validated like the file)");
    cmd->add_option("--seed", args.seed, "override the scenario seed");
}

popf::ScenarioConfig load(const CommonArgs& args) {
    std::vector<std::string> sets = args.sets;
    if (args.seed) sets.push_back("seed=" + std::to_string(*args.seed));
    return popf::read_config(args.config_path, sets);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create directory '" + dir + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
    out << text;
}

std::string regime_name(popf::EstimatorKind kind) {
    switch (kind) {
        case popf::EstimatorKind::none: return "none";
        case popf::EstimatorKind::ekf_naive: return "ekf_naive";
        case popf::EstimatorKind::popf: return "popf";
    }
    return "?";
}

/// Runs one scenario and writes trace.csv, metrics.txt and the resolved
/// config; returns the summary.
popf::MetricsSummary run_and_write(const popf::ScenarioConfig& config,
                                   const std::string& dir) {
    ensure_dir(dir);
    const popf::Trace trace = popf::run_scenario(config);
    const popf::MetricsSummary metrics = popf::summarize(trace);

    const std::string trace_path = dir + "/trace.csv";
    popf::write_trace_csv(trace, trace_path);
    std::cout << trace_path << "\n";

    const std::string metrics_path = dir + "/metrics.txt";
    {
        std::ofstream out(metrics_path, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot write '" + metrics_path + "'");
        popf::write_metrics(metrics, out);
    }
    std::cout << metrics_path << "\n";

    const std::string config_path = dir + "/config_resolved.cfg";
    popf::write_config(config, config_path);
    std::cout << config_path << "\n";
    return metrics;
}

int cmd_run(const CommonArgs& args) {
    const popf::ScenarioConfig config = load(args);
    run_and_write(config, args.out_dir);
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    const popf::ScenarioConfig base = load(args);
    ensure_dir(args.out_dir);
    std::ostringstream table;
    table << "regime converged final_rho final_abs_theta rmse_x rmse_y rmse_theta\n";
    for (popf::EstimatorKind kind : {popf::EstimatorKind::none,
                                     popf::EstimatorKind::ekf_naive,
                                     popf::EstimatorKind::popf}) {
        popf::ScenarioConfig config = base;
        config.estimator = kind;
        const std::string name = regime_name(kind);
        const popf::MetricsSummary m = run_and_write(config, args.out_dir + "/" + name);
        table << name << " " << (m.converged ? "true" : "false") << " "
              << popf::cfg::format_double(m.final_rho) << " "
              << popf::cfg::format_double(m.final_abs_theta) << " "
              << popf::cfg::format_double(m.rmse_x) << " "
              << popf::cfg::format_double(m.rmse_y) << " "
              << popf::cfg::format_double(m.rmse_theta) << "\n";
    }
    const std::string table_path = args.out_dir + "/compare.txt";
    write_text(table_path, table.str());
    std::cout << table_path << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& key,
              const std::vector<std::string>& values,
              const std::vector<long>& seeds) {
    if (values.empty()) throw popf::ConfigError("sweep: need at least one --value");
    std::vector<long> seed_list = seeds;
    if (seed_list.empty()) seed_list.push_back(0);
    ensure_dir(args.out_dir);
    std::ostringstream summary;
    summary << "value seeds converged median_final_rho median_final_abs_theta\n";
    for (const std::string& value : values) {
        CommonArgs point = args;
        point.sets.push_back(key + "=" + value);
        const popf::ScenarioConfig config = load(point);  // validates the pair
        std::vector<uint64_t> seeds_u;
        for (long s : seed_list) seeds_u.push_back(static_cast<uint64_t>(s));
        const popf::MonteCarloSummary mc = popf::run_monte_carlo(config, seeds_u);
        for (size_t i = 0; i < seeds_u.size(); ++i) {
            popf::ScenarioConfig run_cfg = config;
            run_cfg.seed = seeds_u[i];
            run_and_write(run_cfg,
                          args.out_dir + "/" + key + "=" + value + "/seed" +
                              std::to_string(seeds_u[i]));
        }
        summary << value << " " << seeds_u.size() << " " << mc.converged_count << " "
                << popf::cfg::format_double(mc.median_final_rho) << " "
                << popf::cfg::format_double(mc.median_final_abs_theta) << "\n";
    }
    const std::string summary_path = args.out_dir + "/sweep.txt";
    write_text(summary_path, summary.str());
    std::cout << summary_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Networked differential-drive stabilization simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, compare_args, sweep_args;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    std::vector<long> sweep_seeds;

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    add_common(run, run_args);
    CLI::App* compare =
        app.add_subcommand("compare", "run the none/ekf_naive/popf regimes side by side");
    add_common(compare, compare_args);
    CLI::App* sweep = app.add_subcommand("sweep", "sweep one config key over values");
    add_common(sweep, sweep_args);
    sweep->add_option("--key", sweep_key, "config key to sweep")->required();
    sweep->add_option("--values", sweep_values, "values for the swept key")->required();
    sweep->add_option("--seeds", sweep_seeds, "seeds to aggregate over");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (compare->parsed()) return cmd_compare(compare_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_key, sweep_values,
                                              sweep_seeds);
    } catch (const popf::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const popf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const popf::NumericError& e) {
        std::cerr << "numeric error: " << e.what()
                  << " (condition ~" << e.condition_estimate() << ")\n";
        return kExitNumeric;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
