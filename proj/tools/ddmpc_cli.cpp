// Copyright 2026 The DDMPC Steering Authors
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

// Command-line front end: collect, check-pe, run, compare, plot, tune-pid.
//
// Exit codes: 0 success, 1 failed run or excitation check, 2 config/parse error.

#include <ddmpc/config.hpp>
#include <ddmpc/experiment.hpp>
#include <ddmpc/hankel.hpp>
#include <ddmpc/report.hpp>
#include <ddmpc/trajectory_io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config, "key = value config file (defaults apply when omitted)");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opts.seed, "excitation seed, overrides data.seed");
}

ddmpc::AppConfig resolve_config(const CommonOptions& opts) {
    ddmpc::AppConfig cfg = opts.config.empty() ? ddmpc::AppConfig{} : ddmpc::load_config(opts.config);
    if (opts.seed) cfg.data.seed = *opts.seed;
    return cfg;
}

fs::path prepare_out(const CommonOptions& opts) {
    const fs::path dir(opts.out);
    fs::create_directories(dir);
    return dir;
}

ddmpc::RunOptions run_options(bool no_timing) {
    ddmpc::RunOptions o;
    o.record_timing = !no_timing;
    return o;
}

int cmd_collect(const CommonOptions& opts) {
    const ddmpc::AppConfig cfg = resolve_config(opts);
    const ddmpc::TrajectoryData data = ddmpc::collect_data(cfg);
    const fs::path path = prepare_out(opts) / "data.csv";
    ddmpc::save_trajectory(data, path);
    std::cout << "wrote " << data.length() << " samples (" << ddmpc::to_string(cfg.data.kind) << ", "
              << cfg.data.amplitude_deg << " deg, seed " << cfg.data.seed << ") to " << path.string() << '\n';
    return 0;
}

int cmd_check_pe(const CommonOptions& opts, const std::string& data_file, Eigen::Index order) {
    const ddmpc::AppConfig cfg = resolve_config(opts);
    const ddmpc::TrajectoryData data =
        data_file.empty() ? ddmpc::collect_data(cfg) : ddmpc::load_trajectory(data_file);
    const Eigen::Index k = order > 0 ? order : cfg.ddmpc.horizon + 2 * cfg.ddmpc.order_bound;
    const ddmpc::ExcitationReport r = ddmpc::check_persistent_excitation(data.inputs, k);
    std::cout << "samples " << data.length() << ", inputs " << data.inputDim() << ", order " << k
              << ", minimum length " << ddmpc::minimum_data_length(data.inputDim(), k) << '\n'
              << "rank " << r.numerical_rank << " / " << r.required_rank << ", sigma_max "
              << r.largest_singular_value << ", smallest retained " << r.smallest_retained_singular_value
              << '\n';
    if (!r.persistently_exciting) {
        if (r.diagnostic.starts_with("not persistently exciting"))
            std::cout << r.diagnostic << '\n';
        else
            std::cout << "not persistently exciting: " << r.diagnostic << '\n';
        return kExitFailed;
    }
    std::cout << r.diagnostic << '\n';
    return 0;
}

void emit_report(const ddmpc::RunReport& report, const fs::path& dir) {
    ddmpc::save_run_csv(report, dir / (report.scenario + "_" + report.controller + ".csv"));
    if (!report.records.empty()) ddmpc::write_run_plots(report, dir);
}

int cmd_run(const CommonOptions& opts, const std::string& controller, bool no_timing) {
    const ddmpc::AppConfig cfg = resolve_config(opts);
    const ddmpc::RunReport report = ddmpc::run_controller(controller, cfg, run_options(no_timing));
    const fs::path dir = prepare_out(opts);
    emit_report(report, dir);
    ddmpc::Comparison table{cfg.scenario.name, {ddmpc::make_row(report)}};
    std::cout << ddmpc::format_comparison(table);
    return report.failed() ? kExitFailed : 0;
}

int cmd_compare(const CommonOptions& opts, bool no_timing) {
    const ddmpc::AppConfig cfg = resolve_config(opts);
    const ddmpc::ComparisonResult result = ddmpc::compare_controllers(cfg, run_options(no_timing));
    const fs::path dir = prepare_out(opts);
    bool failed = false;
    for (const ddmpc::RunReport& r : result.reports) {
        emit_report(r, dir);
        failed = failed || r.failed();
    }
    const std::string text = ddmpc::format_comparison(result.table);
    {
        std::ofstream out(dir / "summary.txt");
        out << text;
    }
    {
        std::ofstream out(dir / "summary.csv");
        ddmpc::write_comparison_csv(result.table, out);
    }
    std::cout << text;
    return failed ? kExitFailed : 0;
}

int cmd_plot(const CommonOptions& opts, const std::vector<std::string>& inputs) {
    const fs::path dir = prepare_out(opts);
    for (const std::string& file : inputs) {
        ddmpc::RunReport report = ddmpc::load_run_csv(file);
        // File names follow <scenario>_<controller>.csv.
        const std::string stem = fs::path(file).stem().string();
        report.scenario = stem;
        report.controller = "run";
        for (const std::string& name : ddmpc::controller_names()) {
            const std::string suffix = "_" + name;
            if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
                report.scenario = stem.substr(0, stem.size() - suffix.size());
                report.controller = name;
            }
        }
        for (const fs::path& p : ddmpc::write_run_plots(report, dir)) std::cout << "wrote " << p.string() << '\n';
    }
    return 0;
}

int cmd_tune_pid(const CommonOptions& opts) {
    const ddmpc::AppConfig cfg = resolve_config(opts);
    const std::vector<double> kp{0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4, 12.8, 25.6, 51.2};
    const std::vector<double> ki{0.0, 0.05};
    const std::vector<double> kd{0.0, 0.1, 0.2, 0.4, 0.8};
    const std::vector<double> kh{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    const auto grid = ddmpc::tune_pid(cfg, kp, ki, kd, kh);
    const fs::path dir = prepare_out(opts);
    std::ofstream out(dir / "pid_grid.csv");
    out << "kp,ki,kd,k_heading,status,rms_err,max_abs_err\n";
    for (const auto& g : grid)
        out << g.gains.kp << ',' << g.gains.ki << ',' << g.gains.kd << ',' << g.gains.k_heading << ','
            << (g.failed ? "failed" : "ok") << ',' << g.summary.rms_error << ',' << g.summary.max_abs_error << '\n';
    const auto& best = grid.front();
    std::printf("best of %zu: kp %g ki %g kd %g k_heading %g -> rms %.4e m, max %.4e m\n", grid.size(),
                best.gains.kp, best.gains.ki, best.gains.kd, best.gains.k_heading, best.summary.rms_error,
                best.summary.max_abs_error);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven MPC steering: data collection, closed-loop runs and comparisons"};
    app.require_subcommand(1);

    CommonOptions collect_opts, pe_opts, run_opts, compare_opts, plot_opts, tune_opts;
    std::string pe_data;
    Eigen::Index pe_order = 0;
    std::string controller;
    bool run_no_timing = false, compare_no_timing = false;
    std::vector<std::string> plot_inputs;

    auto* collect = app.add_subcommand("collect", "simulate open-loop excitation and write data.csv");
    add_common(collect, collect_opts);

    auto* pe = app.add_subcommand("check-pe", "rank diagnostic of the input Hankel matrix");
    add_common(pe, pe_opts);
    pe->add_option("--data", pe_data, "trajectory CSV (t,u...,y...); simulated from config when omitted");
    pe->add_option("--order", pe_order, "Hankel order (default L + 2v)");

    auto* run = app.add_subcommand("run", "closed-loop run of one controller");
    add_common(run, run_opts);
    run->add_option("--controller", controller, "ddmpc | kin_mpc | pid")
        ->required()
        ->check(CLI::IsMember({"ddmpc", "kin_mpc", "pid"}));
    run->add_flag("--no-timing", run_no_timing, "log solve times as zero for reproducible CSVs");

    auto* compare = app.add_subcommand("compare", "run all three controllers and tabulate");
    add_common(compare, compare_opts);
    compare->add_flag("--no-timing", compare_no_timing, "log solve times as zero for reproducible CSVs");

    auto* plot = app.add_subcommand("plot", "re-render SVG plots from run CSVs");
    add_common(plot, plot_opts);
    plot->add_option("inputs", plot_inputs, "run report CSVs")->required()->check(CLI::ExistingFile);

    auto* tune = app.add_subcommand("tune-pid", "grid search of PID gains on the configured scenario");
    add_common(tune, tune_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*collect) return cmd_collect(collect_opts);
        if (*pe) return cmd_check_pe(pe_opts, pe_data, pe_order);
        if (*run) return cmd_run(run_opts, controller, run_no_timing);
        if (*compare) return cmd_compare(compare_opts, compare_no_timing);
        if (*plot) return cmd_plot(plot_opts, plot_inputs);
        if (*tune) return cmd_tune_pid(tune_opts);
    } catch (const ddmpc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ddmpc::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailed;
    }
    return 0;
}
