#pragma once

#include "eaic/config.hpp"
#include "eaic/csv.hpp"
#include "eaic/world.hpp"

#include <memory>
#include <string>
#include <vector>

namespace eaic {

/// Width of the window after the contact-loss event inside which the first
/// impact peak is attributed to the loss; everything later counts as the
/// interaction phase.
inline constexpr double kImpactWindow = 0.8;

/// Every number here is recomputable from the CSV log columns alone; see
/// build_report.
struct RunReport {
    std::string controller;
    double peak_impact_contact_loss = 0.0;
    double peak_impact_after_release = 0.0;
    double max_disturbance_displacement = 0.0;
    double min_tank_energy = 0.0;
    double min_energy_scale = 1.0;
    double max_damping_scale = 1.0;
    int violation_count = 0;
    bool diverged = false;
    double contact_loss_time = -1.0;
    double duration = 0.0;
};

struct RunResult {
    std::vector<LogRecord> log;
    RunReport report;
    int exit_code = 0;  // 0 pass, 1 invariant violation, 3 divergence
    int dof = 0;
};

struct RunOptions {
    bool strict = false;                 // abort on the first invariant violation
    std::string output_dir;              // when set, write the CSV log and report
    std::optional<std::string> controller_override;
    std::optional<double> dt_override;
};

std::unique_ptr<Controller> make_controller(const ControllerConfig& config, int dof);

/// Drive the three-phase task: press down to the engagement force, track the
/// screw upward until the planner believes the screw is out (the flawed shaft
/// lets go early), settle, then apply and release the human disturbance.
/// Phase boundaries are event-driven, so all controllers face the same
/// physical milestones.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Report fields from the log columns: the contact-loss peak is the maximum
/// workbench force within kImpactWindow of the first contact_lost row, the
/// release peak the maximum after that window, the displacement the distance
/// from the (fixed-x/y, logged-z) desired pose over the same span.
RunReport build_report(const std::vector<LogRecord>& log, const std::string& controller_kind,
                       bool has_tank, bool tracks_energy_scale);

/// Same rules applied to a parsed CSV, for auditing reports against logs.
RunReport report_from_csv(const CsvTable& table, const std::string& controller_kind,
                          bool has_tank, bool tracks_energy_scale);

/// Per-step invariant violations derivable from logged columns: tank bounds,
/// extraction rate, energy-scale hold and the energy cap.
int count_violations(const std::vector<LogRecord>& log, const std::string& controller_kind,
                     double dt, double tank_lower, double tank_upper, double extraction_limit,
                     double energy_limit);

struct ComparisonReport {
    std::vector<RunReport> runs;
    std::string baseline;  // controller kind reductions are measured against
    std::vector<double> contact_loss_reduction_pct;
    std::vector<double> release_reduction_pct;
};

/// Run several configurations over an identical world and compare reports;
/// throws std::invalid_argument when the world settings differ.
ComparisonReport compare(const std::vector<ScenarioConfig>& configs, const RunOptions& options = {});

double reduction_percent(double value, double baseline);
std::string comparison_table(const ComparisonReport& report);
std::string comparison_json(const ComparisonReport& report);
std::string report_json(const RunReport& report);

/// Copy selected columns of a log into a new CSV; unknown names raise an
/// error listing the available columns. Figure presets name column sets.
void extract_plot_series(const std::string& log_path, const std::vector<std::string>& columns,
                         const std::string& out_path);
std::vector<std::string> figure_columns(const std::string& figure);

}  // namespace eaic
