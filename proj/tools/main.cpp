#include "eaic/config.hpp"
#include "eaic/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

void print_issues(const eaic::config_error& error) {
    std::cerr << "configuration errors:\n";
    for (const auto& issue : error.issues()) {
        std::cerr << "  " << issue.key << ": " << issue.reason << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cartesian manipulator controller comparison on a flawed unscrewing task"};
    app.require_subcommand(1);

    std::vector<std::string> config_paths;
    std::string out_dir = "out";
    std::string controller_override;
    double dt_override = 0.0;
    std::uint64_t seed = 0;  // reserved; scenarios are deterministic
    bool strict = false;

    auto add_common = [&](CLI::App* cmd, bool multi_config) {
        auto* opt = cmd->add_option("--config", config_paths, "scenario configuration file(s)")
                        ->required();
        if (!multi_config) opt->expected(1);
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--controller", controller_override,
                        "override the controller kind (impedance, hybrid, energy_aware)");
        cmd->add_option("--dt", dt_override, "override the integration step [s]");
        cmd->add_option("--seed", seed, "reserved for future stochastic scenarios");
        cmd->add_flag("--strict", strict, "abort on the first invariant violation");
    };

    auto* run_cmd = app.add_subcommand("run", "run one scenario and write log + report");
    add_common(run_cmd, false);

    auto* compare_cmd = app.add_subcommand("compare", "run several scenarios over one world");
    add_common(compare_cmd, true);

    auto* validate_cmd = app.add_subcommand("validate", "check a configuration file");
    validate_cmd->add_option("--config", config_paths, "scenario configuration file")->required();

    auto* plot_cmd = app.add_subcommand("plot", "extract plot series from a run log");
    std::string log_path;
    std::string figure;
    std::string columns_arg;
    std::string series_out = "series.csv";
    plot_cmd->add_option("--log", log_path, "run log CSV")->required();
    plot_cmd->add_option("--figure", figure, "named column set: positions, external_force, tank, energy");
    plot_cmd->add_option("--columns", columns_arg, "comma-separated column names");
    plot_cmd->add_option("--out", series_out, "output series file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const eaic::ScenarioConfig config = eaic::load_config(config_paths.front());
            eaic::RunOptions options;
            options.strict = strict;
            options.output_dir = out_dir;
            if (!controller_override.empty()) options.controller_override = controller_override;
            if (dt_override > 0.0) options.dt_override = dt_override;
            const eaic::RunResult result = eaic::run_scenario(config, options);
            std::cout << eaic::report_json(result.report) << "\n";
            if (result.report.diverged) {
                std::cerr << "run diverged; partial log retained in " << out_dir << "\n";
                return kExitDivergence;
            }
            return result.exit_code == 0 ? kExitOk : kExitViolation;
        }

        if (compare_cmd->parsed()) {
            std::vector<eaic::ScenarioConfig> configs;
            for (const auto& path : config_paths) configs.push_back(eaic::load_config(path));
            eaic::RunOptions options;
            options.strict = strict;
            options.output_dir = out_dir;
            if (dt_override > 0.0) options.dt_override = dt_override;
            const eaic::ComparisonReport report = eaic::compare(configs, options);
            std::cout << eaic::comparison_table(report);
            std::filesystem::create_directories(out_dir);
            std::ofstream json_out(std::filesystem::path(out_dir) / "comparison.json");
            json_out << eaic::comparison_json(report) << "\n";
            for (const auto& run : report.runs) {
                if (run.diverged) return kExitDivergence;
                if (run.violation_count > 0) return kExitViolation;
            }
            return kExitOk;
        }

        if (validate_cmd->parsed()) {
            eaic::load_config(config_paths.front());
            std::cout << "configuration ok\n";
            return kExitOk;
        }

        if (plot_cmd->parsed()) {
            std::vector<std::string> columns;
            if (!figure.empty()) {
                columns = eaic::figure_columns(figure);
            } else if (!columns_arg.empty()) {
                std::stringstream ss(columns_arg);
                std::string name;
                while (std::getline(ss, name, ',')) columns.push_back(name);
            } else {
                std::cerr << "plot: give either --figure or --columns\n";
                return kExitConfig;
            }
            eaic::extract_plot_series(log_path, columns, series_out);
            std::cout << "wrote " << series_out << "\n";
            return kExitOk;
        }
    } catch (const eaic::config_error& error) {
        print_issues(error);
        return kExitConfig;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
