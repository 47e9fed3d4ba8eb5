#include "eaic/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eaic {

using nlohmann::json;

namespace {

constexpr double kTankTol = 1e-9;
constexpr double kExtractionTol = 1e-6;
constexpr double kHoldTol = 1e-12;
constexpr double kCapTol = 1e-3;

ScrewProcess::State parse_screw_state(const std::string& name) {
    for (auto s : {ScrewProcess::State::idle, ScrewProcess::State::engaged,
                   ScrewProcess::State::unscrewing, ScrewProcess::State::contact_lost,
                   ScrewProcess::State::done}) {
        if (name == ScrewProcess::state_name(s)) return s;
    }
    throw std::runtime_error("unknown screw state in log: " + name);
}

std::vector<LogRecord> records_from_csv(const CsvTable& table) {
    const int c_t = table.column("t");
    const int c_x = table.column("ee_x");
    const int c_y = table.column("ee_y");
    const int c_z = table.column("ee_z");
    const int c_zd = table.column("ee_zd");
    const int c_fc = table.column("f_contact_z");
    const int c_fe = table.column("f_ext_z");
    const int c_lambda = table.column("lambda");
    const int c_beta = table.column("beta");
    const int c_gamma = table.column("gamma");
    const int c_k = table.column("k");
    const int c_j = table.column("j");
    const int c_tank = table.column("E_tank");
    const int c_ptask = table.column("P_task");
    const int c_etot = table.column("E_total");
    const int c_ttot = table.column("T_total");
    const int c_utot = table.column("U_total");
    const int c_state = table.column("screw_state");
    for (int c : {c_t, c_x, c_y, c_z, c_zd, c_fc, c_fe, c_lambda, c_beta, c_gamma, c_k, c_j,
                  c_tank, c_ptask, c_etot, c_ttot, c_utot, c_state}) {
        if (c < 0) throw std::runtime_error("log is missing required columns");
    }
    std::vector<LogRecord> records;
    records.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        LogRecord r;
        r.t = table.number(i, c_t);
        r.ee_position = Vec3(table.number(i, c_x), table.number(i, c_y), table.number(i, c_z));
        r.desired_z = table.number(i, c_zd);
        r.contact_force_z = table.number(i, c_fc);
        r.external_force_z = table.number(i, c_fe);
        r.diag.energy_scale = table.number(i, c_lambda);
        r.diag.damping_scale = table.number(i, c_beta);
        r.diag.power_scale = table.number(i, c_gamma);
        r.diag.drain_gate = static_cast<int>(table.number(i, c_k));
        r.diag.fill_gate = static_cast<int>(table.number(i, c_j));
        r.diag.tank_energy = table.number(i, c_tank);
        r.diag.task_power = table.number(i, c_ptask);
        r.diag.total_energy = table.number(i, c_etot);
        r.diag.kinetic_energy = table.number(i, c_ttot);
        r.diag.potential_energy = table.number(i, c_utot);
        r.screw_state = parse_screw_state(table.rows[i][static_cast<size_t>(c_state)]);
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

std::unique_ptr<Controller> make_controller(const ControllerConfig& config, int dof) {
    const StiffnessSet stiffness = StiffnessSet::isotropic(
        config.stiffness_translational, config.stiffness_rotational, config.stiffness_coupling);
    const MatX b_init = config.damping_initial * MatX::Identity(dof, dof);
    TankState tank;
    tank.energy = config.tank.initial;
    tank.upper = config.tank.upper;
    tank.lower = config.tank.lower;
    tank.p_lower = config.tank.extraction_limit;

    if (config.kind == "impedance") {
        return std::make_unique<ImpedanceController>(stiffness, b_init);
    }
    if (config.kind == "hybrid") {
        HybridController::Params params;
        params.stiffness = stiffness;
        params.b_init = b_init;
        params.tank = tank;
        params.force_gain = config.force_gain;
        params.axis_selection = Vec6::Zero();
        params.axis_selection[2] = 1.0;  // force control along base z
        params.desired_wrench = Vec6::Zero();
        params.desired_wrench[2] = config.desired_force_z;
        return std::make_unique<HybridController>(std::move(params));
    }
    if (config.kind == "energy_aware") {
        EnergyAwareController::Params params;
        params.stiffness = stiffness;
        params.b_init = b_init;
        params.energy_limit = config.energy_limit;
        params.power_limit = config.power_limit;
        params.tank = tank;
        return std::make_unique<EnergyAwareController>(std::move(params));
    }
    throw std::invalid_argument("unknown controller kind: " + config.kind);
}

RunResult run_scenario(const ScenarioConfig& base_config, const RunOptions& options) {
    ScenarioConfig config = base_config;
    if (options.controller_override) config.controller.kind = *options.controller_override;
    if (options.dt_override) config.world.dt = *options.dt_override;

    ChainModel model = config.make_model();
    model.validate();
    const int n = model.dof();

    SimWorld world;
    world.model = model;
    world.robot.q = config.model.q0;
    world.robot.qdot = VecX::Zero(n);
    world.dt = config.world.dt;

    const Transform start_pose = forward_kinematics(model, config.model.q0);
    world.contact.bench_z = start_pose.translation.z() - config.world.screw.head_above_bench;
    world.contact.stiffness = config.world.bench.stiffness;
    world.contact.damping = config.world.bench.damping;

    world.screw.head_z = start_pose.translation.z();
    world.screw.pitch = config.world.screw.pitch;
    world.screw.speed = config.world.screw.speed_rps;
    world.screw.engage_force = config.world.screw.engage_force;
    world.screw.nominal_length = config.world.screw.nominal_length;
    world.screw.actual_length = config.world.screw.actual_length;
    world.screw.progress_ratio = config.world.screw.progress_ratio;
    world.screw.support_stiffness = config.world.screw.support_stiffness;
    world.screw.support_damping = config.world.screw.support_damping;
    world.screw.state = ScrewProcess::State::engaged;

    auto controller = make_controller(config.controller, n);
    const bool is_hybrid = config.controller.kind == "hybrid";
    const bool is_energy_aware = config.controller.kind == "energy_aware";
    const bool has_tank = is_hybrid || is_energy_aware;

    Transform desired = start_pose;
    desired.child = frames::desired;
    double desired_z = start_pose.translation.z();
    const double press_target = config.scenario.press_margin * config.world.screw.engage_force;
    const double press_floor = world.contact.bench_z - 0.05;
    const double rise_rate = config.world.screw.pitch * config.world.screw.speed_rps;

    enum class Phase { engage, unscrew, settle, disturb, final_settle };
    Phase phase = Phase::engage;
    double plan_travel = 0.0;
    double settle_deadline = 0.0;
    double disturbance_end = 0.0;
    double final_deadline = 0.0;
    bool finished = false;

    RunResult result;
    result.dof = n;
    result.log.reserve(static_cast<size_t>(config.scenario.time_limit / world.dt) + 1);

    while (world.time() < config.scenario.time_limit && !finished) {
        const double t = world.time();
        const ExternalForces sensed = external_wrench(world);

        switch (phase) {
            case Phase::engage: {
                if (!is_hybrid && sensed.screw_z < press_target) {
                    desired_z = std::max(press_floor, desired_z - config.scenario.engage_step);
                }
                if (sensed.screw_z >= press_target ||
                    (is_hybrid && sensed.screw_z >= config.world.screw.engage_force)) {
                    world.drill_on = true;
                    phase = Phase::unscrew;
                }
                break;
            }
            case Phase::unscrew: {
                plan_travel += rise_rate * world.dt;
                if (!is_hybrid) desired_z += rise_rate * world.dt;
                if (plan_travel >= config.world.screw.nominal_length) {
                    world.drill_on = false;
                    phase = Phase::settle;
                    settle_deadline = t + config.scenario.settle_after_plan;
                }
                break;
            }
            case Phase::settle: {
                if (t >= settle_deadline) {
                    DisturbanceEntry entry;
                    entry.t_start = t + config.scenario.disturbance.delay;
                    entry.ramp = config.scenario.disturbance.ramp;
                    entry.hold = config.scenario.disturbance.hold;
                    entry.direction = config.scenario.disturbance.direction;
                    entry.distance = config.scenario.disturbance.distance;
                    entry.stiffness = config.scenario.disturbance.stiffness;
                    entry.damping = config.scenario.disturbance.damping;
                    entry.angular_damping = config.scenario.disturbance.angular_damping;
                    entry.anchor = forward_kinematics(model, world.robot.q).translation;
                    world.disturbances.add(entry);
                    disturbance_end = entry.t_end();
                    phase = Phase::disturb;
                }
                break;
            }
            case Phase::disturb: {
                if (t >= disturbance_end) {
                    phase = Phase::final_settle;
                    final_deadline = t + config.scenario.final_settle;
                }
                break;
            }
            case Phase::final_settle: {
                if (t >= final_deadline) finished = true;
                break;
            }
        }
        if (finished) break;

        desired.translation.z() = desired_z;
        const ControlOutput out = controller->step(model, world.robot, desired, sensed.total, world.dt);
        const StepResult step = world_step(world, out, desired_z);
        result.log.push_back(step.record);

        if (step.diverged) {
            result.report.diverged = true;
            result.exit_code = 3;
            break;
        }
        if (options.strict && has_tank && !result.log.empty()) {
            const size_t n_log = result.log.size();
            const std::vector<LogRecord> tail(result.log.end() - std::min<size_t>(2, n_log),
                                              result.log.end());
            const int violations = count_violations(
                tail, config.controller.kind, world.dt, config.controller.tank.lower,
                config.controller.tank.upper, config.controller.tank.extraction_limit,
                config.controller.energy_limit);
            if (violations > 0) {
                result.exit_code = 1;
                break;
            }
        }
    }

    RunReport report = build_report(result.log, config.controller.kind, has_tank, is_energy_aware);
    report.violation_count = count_violations(result.log, config.controller.kind, world.dt,
                                              config.controller.tank.lower, config.controller.tank.upper,
                                              config.controller.tank.extraction_limit,
                                              config.controller.energy_limit);
    report.diverged = result.report.diverged;
    result.report = report;
    if (result.exit_code == 0 && report.violation_count > 0) result.exit_code = 1;

    if (!options.output_dir.empty()) {
        std::filesystem::create_directories(options.output_dir);
        const auto dir = std::filesystem::path(options.output_dir);
        write_log_csv((dir / config.output.log).string(), result.log, n);
        std::ofstream rep(dir / config.output.report);
        rep << report_json(result.report) << "\n";
    }
    return result;
}

RunReport build_report(const std::vector<LogRecord>& log, const std::string& controller_kind,
                       bool has_tank, bool tracks_energy_scale) {
    RunReport report;
    report.controller = controller_kind;
    if (log.empty()) return report;

    double loss_time = -1.0;
    for (const auto& record : log) {
        if (record.screw_state == ScrewProcess::State::contact_lost) {
            loss_time = record.t;
            break;
        }
    }
    report.contact_loss_time = loss_time;
    report.duration = log.back().t;

    const double split = loss_time >= 0.0 ? loss_time + kImpactWindow : report.duration;
    if (loss_time >= 0.0) {
        report.peak_impact_contact_loss = peak_impact_force(log, loss_time, split);
        report.peak_impact_after_release = peak_impact_force(log, std::nextafter(split, 1e300),
                                                             report.duration);
    }

    const double desired_x = log.front().ee_position.x();
    const double desired_y = log.front().ee_position.y();
    double max_disp = 0.0;
    for (const auto& record : log) {
        if (record.t <= split) continue;
        const double dx = record.ee_position.x() - desired_x;
        const double dy = record.ee_position.y() - desired_y;
        const double dz = record.ee_position.z() - record.desired_z;
        max_disp = std::max(max_disp, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    report.max_disturbance_displacement = max_disp;

    report.min_tank_energy = has_tank ? log.front().diag.tank_energy : 0.0;
    for (const auto& record : log) {
        if (has_tank) report.min_tank_energy = std::min(report.min_tank_energy, record.diag.tank_energy);
        if (tracks_energy_scale) {
            report.min_energy_scale = std::min(report.min_energy_scale, record.diag.energy_scale);
        }
        report.max_damping_scale = std::max(report.max_damping_scale, record.diag.damping_scale);
    }
    return report;
}

RunReport report_from_csv(const CsvTable& table, const std::string& controller_kind,
                          bool has_tank, bool tracks_energy_scale) {
    return build_report(records_from_csv(table), controller_kind, has_tank, tracks_energy_scale);
}

int count_violations(const std::vector<LogRecord>& log, const std::string& controller_kind,
                     double dt, double tank_lower, double tank_upper, double extraction_limit,
                     double energy_limit) {
    const bool has_tank = controller_kind == "hybrid" || controller_kind == "energy_aware";
    const bool scale_checks = controller_kind == "energy_aware";
    if (!has_tank) return 0;

    int violations = 0;
    for (size_t i = 0; i < log.size(); ++i) {
        const auto& d = log[i].diag;
        if (d.tank_energy < tank_lower - kTankTol || d.tank_energy > tank_upper + kTankTol) {
            ++violations;
        }
        if (i > 0) {
            const double flow = (d.tank_energy - log[i - 1].diag.tank_energy) / dt;
            if (flow < extraction_limit - kExtractionTol) ++violations;
        }
        if (scale_checks) {
            const bool hold_case = d.drain_gate == 0 && d.task_power <= 0.0;
            if (i > 0 && hold_case &&
                d.energy_scale > log[i - 1].diag.energy_scale + kHoldTol) {
                ++violations;
            }
            const bool scaling_active = d.energy_scale < 1.0 - kHoldTol &&
                                        d.energy_scale > kHoldTol && !hold_case;
            if (scaling_active &&
                d.kinetic_energy + d.potential_energy > energy_limit + kCapTol) {
                ++violations;
            }
        }
    }
    return violations;
}

ComparisonReport compare(const std::vector<ScenarioConfig>& configs, const RunOptions& options) {
    if (configs.size() < 2) throw std::invalid_argument("compare: need at least two configurations");

    auto world_fingerprint = [](const ScenarioConfig& config) {
        json j = json::parse(serialize_config(config));
        j.erase("controller");
        j.erase("output");
        return j.dump();
    };
    const std::string reference = world_fingerprint(configs.front());
    for (size_t i = 1; i < configs.size(); ++i) {
        if (world_fingerprint(configs[i]) != reference) {
            throw std::invalid_argument("compare: configurations must share identical world settings");
        }
    }

    ComparisonReport report;
    for (const auto& config : configs) {
        RunOptions run_options = options;
        if (!options.output_dir.empty()) {
            run_options.output_dir =
                (std::filesystem::path(options.output_dir) / config.controller.kind).string();
        }
        report.runs.push_back(run_scenario(config, run_options).report);
    }

    size_t baseline_index = 0;
    for (size_t i = 0; i < report.runs.size(); ++i) {
        if (report.runs[i].controller == "impedance") {
            baseline_index = i;
            break;
        }
    }
    report.baseline = report.runs[baseline_index].controller;
    const RunReport& baseline = report.runs[baseline_index];
    for (const auto& run : report.runs) {
        report.contact_loss_reduction_pct.push_back(
            reduction_percent(run.peak_impact_contact_loss, baseline.peak_impact_contact_loss));
        report.release_reduction_pct.push_back(
            reduction_percent(run.peak_impact_after_release, baseline.peak_impact_after_release));
    }
    return report;
}

double reduction_percent(double value, double baseline) {
    if (baseline <= 0.0) return 0.0;
    return (1.0 - value / baseline) * 100.0;
}

namespace {

json report_to_json(const RunReport& report) {
    json j;
    j["controller"] = report.controller;
    j["peak_impact_contact_loss_n"] = report.peak_impact_contact_loss;
    j["peak_impact_after_release_n"] = report.peak_impact_after_release;
    j["max_disturbance_displacement_m"] = report.max_disturbance_displacement;
    j["min_tank_energy_j"] = report.min_tank_energy;
    j["min_energy_scale"] = report.min_energy_scale;
    j["max_damping_scale"] = report.max_damping_scale;
    j["violation_count"] = report.violation_count;
    j["diverged"] = report.diverged;
    j["contact_loss_time_s"] = report.contact_loss_time;
    j["duration_s"] = report.duration;
    return j;
}

}  // namespace

std::string report_json(const RunReport& report) { return report_to_json(report).dump(2); }

std::string comparison_table(const ComparisonReport& report) {
    std::ostringstream os;
    os << "controller      loss_peak[N]  release_peak[N]  max_disp[m]  min_tank[J]  min_lambda  "
          "max_beta  violations\n";
    char line[256];
    for (const auto& run : report.runs) {
        std::snprintf(line, sizeof(line),
                      "%-15s %12.4g %16.4g %12.4g %12.4g %11.4g %9.4g %11d\n",
                      run.controller.c_str(), run.peak_impact_contact_loss,
                      run.peak_impact_after_release, run.max_disturbance_displacement,
                      run.min_tank_energy, run.min_energy_scale, run.max_damping_scale,
                      run.violation_count);
        os << line;
    }
    os << "reductions vs " << report.baseline << " (contact loss / after release):\n";
    for (size_t i = 0; i < report.runs.size(); ++i) {
        std::snprintf(line, sizeof(line), "%-15s %.1f%% / %.1f%%\n",
                      report.runs[i].controller.c_str(), report.contact_loss_reduction_pct[i],
                      report.release_reduction_pct[i]);
        os << line;
    }
    return os.str();
}

std::string comparison_json(const ComparisonReport& report) {
    json j;
    j["baseline"] = report.baseline;
    j["runs"] = json::array();
    for (size_t i = 0; i < report.runs.size(); ++i) {
        json run = report_to_json(report.runs[i]);
        run["contact_loss_reduction_pct"] = report.contact_loss_reduction_pct[i];
        run["release_reduction_pct"] = report.release_reduction_pct[i];
        j["runs"].push_back(run);
    }
    return j.dump(2);
}

void extract_plot_series(const std::string& log_path, const std::vector<std::string>& columns,
                         const std::string& out_path) {
    const CsvTable table = read_csv(log_path);
    std::vector<int> indices;
    for (const auto& name : columns) {
        const int col = table.column(name);
        if (col < 0) {
            std::ostringstream os;
            os << "unknown column '" << name << "'; available columns:";
            for (const auto& h : table.header) os << " " << h;
            throw std::runtime_error(os.str());
        }
        indices.push_back(col);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write series file: " + out_path);
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < indices.size(); ++i) {
            if (i) out << ',';
            out << row[static_cast<size_t>(indices[i])];
        }
        out << '\n';
    }
}

std::vector<std::string> figure_columns(const std::string& figure) {
    if (figure == "positions") return {"t", "ee_x", "ee_y", "ee_z", "ee_zd"};
    if (figure == "external_force") return {"t", "f_ext_z"};
    if (figure == "tank") return {"t", "E_tank", "P_task"};
    if (figure == "energy") return {"t", "E_total", "lambda"};
    throw std::runtime_error("unknown figure '" + figure +
                             "'; available: positions, external_force, tank, energy");
}

}  // namespace eaic
