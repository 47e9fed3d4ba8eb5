#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eaic/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eaic;

namespace {

std::string preset(const std::string& name) {
    return std::string(EAIC_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const RunResult& energy_aware_run() {
    static const RunResult result = run_scenario(load_config(preset("unscrew_energy_aware.json")));
    return result;
}

const RunResult& hybrid_run() {
    static const RunResult result = run_scenario(load_config(preset("unscrew_hybrid.json")));
    return result;
}

}  // namespace

TEST_CASE("bundled energy-aware preset loads its parameters") {
    const ScenarioConfig config = load_config(preset("unscrew_energy_aware.json"));
    CHECK(config.controller.kind == "energy_aware");
    CHECK(config.controller.energy_limit == doctest::Approx(0.7));
    CHECK(config.controller.power_limit == doctest::Approx(0.5));
    CHECK(config.controller.tank.extraction_limit == doctest::Approx(-0.175));
    CHECK(config.controller.tank.upper == doctest::Approx(5.0));
    CHECK(config.controller.tank.lower == doctest::Approx(0.5));
    CHECK(config.controller.tank.initial == doctest::Approx(3.0));
    CHECK(config.controller.stiffness_translational == doctest::Approx(900.0));
    CHECK(config.controller.stiffness_rotational == doctest::Approx(40.0));
    CHECK(config.world.screw.engage_force == doctest::Approx(15.0));
}

TEST_CASE("empty configuration reports every required key") {
    try {
        parse_config("");
        FAIL("expected config_error");
    } catch (const config_error& error) {
        const auto& issues = error.issues();
        CHECK(issues.size() >= 15);
        auto has = [&](const std::string& key) {
            for (const auto& issue : issues) {
                if (issue.key == key && issue.reason == "missing required key") return true;
            }
            return false;
        };
        CHECK(has("model.kind"));
        CHECK(has("model.q0"));
        CHECK(has("controller.kind"));
        CHECK(has("controller.stiffness.translational"));
        CHECK(has("controller.damping.initial"));
        CHECK(has("world.dt"));
        CHECK(has("world.bench.stiffness"));
        CHECK(has("world.screw.engage_force"));
        CHECK(has("scenario.engage_step"));
        CHECK(has("scenario.disturbance.ramp"));
    }
}

TEST_CASE("malformed JSON is a single named error") {
    CHECK_THROWS_AS(parse_config("[1, 2, 3]"), config_error);
    CHECK_THROWS_AS(parse_config("{ not json"), config_error);
}

TEST_CASE("tank bound violation is a single named error") {
    std::string text = slurp(preset("unscrew_energy_aware.json"));
    const std::string needle = "\"lower\": 0.5";
    text.replace(text.find(needle), needle.size(), "\"lower\": 6.0");
    try {
        parse_config(text);
        FAIL("expected config_error");
    } catch (const config_error& error) {
        REQUIRE(error.issues().size() == 1);
        CHECK(error.issues()[0].key == "controller.tank.lower");
    }
}

TEST_CASE("unknown keys are rejected") {
    std::string text = slurp(preset("unscrew_impedance.json"));
    text.replace(text.find("\"dt\""), 4, "\"dt_typo\"");
    try {
        parse_config(text);
        FAIL("expected config_error");
    } catch (const config_error& error) {
        bool unknown = false, missing = false;
        for (const auto& issue : error.issues()) {
            if (issue.key == "world.dt_typo" && issue.reason == "unknown key") unknown = true;
            if (issue.key == "world.dt" && issue.reason == "missing required key") missing = true;
        }
        CHECK(unknown);
        CHECK(missing);
    }
}

TEST_CASE("configuration round-trips through serialization") {
    for (const char* name : {"unscrew_impedance.json", "unscrew_hybrid.json",
                             "unscrew_energy_aware.json"}) {
        const ScenarioConfig config = load_config(preset(name));
        const std::string once = serialize_config(config);
        const ScenarioConfig reparsed = parse_config(once);
        CHECK(serialize_config(reparsed) == once);
    }
}

TEST_CASE("custom chain schema loads and checks q0 length") {
    const std::string text = R"({
      "model": {
        "kind": "custom",
        "q0": [0.0],
        "chain": {
          "joints": [{
            "axis": [0, 1, 0],
            "origin": {"xyz": [0, 0, 0.2], "rpy": [0, 0, 0]},
            "mass": 1.5,
            "com": [0, 0, -0.3],
            "inertia": [0.01, 0.01, 0.01, 0, 0, 0]
          }],
          "ee_offset": {"xyz": [0, 0, -0.6], "rpy": [0, 0, 0]}
        }
      },
      "controller": {
        "kind": "impedance",
        "stiffness": {"translational": 900.0, "rotational": 40.0, "coupling": 0.0},
        "damping": {"initial": 5.0}
      },
      "world": {
        "dt": 0.001,
        "bench": {"stiffness": 100000.0, "damping": 300.0},
        "screw": {"pitch": 0.0008, "speed_rps": 5.0, "engage_force": 15.0,
                  "nominal_length": 0.025, "actual_length": 0.015, "head_above_bench": 0.0,
                  "support_stiffness": 100000.0, "support_damping": 300.0, "progress_ratio": 0.8}
      },
      "scenario": {
        "engage_step": 0.0001, "press_margin": 1.2, "settle_after_plan": 1.5,
        "final_settle": 1.0,
        "disturbance": {"delay": 0.5, "ramp": 1.5, "hold": 1.0, "direction": [1, 0, 0],
                        "distance": 0.3, "stiffness": 500.0, "damping": 10.0}
      }
    })";
    const ScenarioConfig config = parse_config(text);
    CHECK(config.make_model().dof() == 1);
    CHECK(config.model.q0.size() == 1);

    std::string wrong = text;
    const std::string q0 = "\"q0\": [0.0]";
    wrong.replace(wrong.find(q0), q0.size(), "\"q0\": [0.0, 0.0]");
    CHECK_THROWS_AS(parse_config(wrong), config_error);
}

TEST_CASE("log column order and number formatting are pinned") {
    const auto cols = log_columns(2);
    const std::vector<std::string> expected = {
        "t", "q0", "q1", "qdot0", "qdot1", "ee_x", "ee_y", "ee_z", "ee_zd",
        "f_ext_z", "f_contact_z", "lambda", "beta", "gamma", "k", "j",
        "E_tank", "P_task", "E_total", "T_total", "U_total", "screw_state"};
    CHECK(cols == expected);

    LogRecord r;
    r.t = 0.123456789123;
    r.q = (VecX(2) << 1.0, -0.5).finished();
    r.qdot = (VecX(2) << 0.0, 2.25).finished();
    r.ee_position = Vec3(0.25, -0.125, 0.4703);
    r.desired_z = 0.5;
    r.external_force_z = 15.0;
    r.contact_force_z = 0.0;
    r.diag.energy_scale = 0.987654321987;
    r.diag.damping_scale = 1.0;
    r.diag.power_scale = 0.5;
    r.diag.drain_gate = 1;
    r.diag.fill_gate = 0;
    r.diag.tank_energy = 3.0;
    r.diag.task_power = -0.175;
    r.diag.total_energy = 0.7;
    r.diag.kinetic_energy = 0.2;
    r.diag.potential_energy = 0.5;
    r.screw_state = ScrewProcess::State::unscrewing;
    CHECK(format_log_row(r) ==
          "0.123456789,1,-0.5,0,2.25,0.25,-0.125,0.4703,0.5,15,0,0.987654322,1,0.5,1,0,"
          "3,-0.175,0.7,0.2,0.5,unscrewing");
}

namespace {

// 3-joint chain working in the vertical x-z plane, defined entirely through
// the custom model schema.
const char* kCustomChainScenario = R"({
  "model": {
    "kind": "custom",
    "q0": [-0.3, 1.2, 0.6],
    "chain": {
      "gravity": [0, 0, -9.80665],
      "joints": [
        {"axis": [0, 1, 0], "origin": {"xyz": [0, 0, 0.2], "rpy": [0, 0, 0]},
         "mass": 2.5, "com": [0.2, 0, 0], "inertia": [0.01, 0.04, 0.04, 0, 0, 0],
         "effort_limit": 60.0},
        {"axis": [0, 1, 0], "origin": {"xyz": [0.4, 0, 0], "rpy": [0, 0, 0]},
         "mass": 1.8, "com": [0.2, 0, 0], "inertia": [0.008, 0.03, 0.03, 0, 0, 0],
         "effort_limit": 60.0},
        {"axis": [0, 1, 0], "origin": {"xyz": [0.4, 0, 0], "rpy": [0, 0, 0]},
         "mass": 1.0, "com": [0.1, 0, 0], "inertia": [0.004, 0.01, 0.01, 0, 0, 0],
         "effort_limit": 60.0}
      ],
      "ee_offset": {"xyz": [0.25, 0, 0], "rpy": [0, 0, 0]}
    }
  },
  "controller": {
    "kind": "energy_aware",
    "stiffness": {"translational": 900.0, "rotational": 40.0, "coupling": 0.0},
    "damping": {"initial": 5.0},
    "energy_limit": 0.7,
    "power_limit": 0.5,
    "tank": {"initial": 3.0, "upper": 5.0, "lower": 0.5, "extraction_limit": -0.175}
  },
  "world": {
    "dt": 0.001,
    "bench": {"stiffness": 2500.0, "damping": 10.0},
    "screw": {"pitch": 0.0008, "speed_rps": 30.0, "engage_force": 15.0,
              "nominal_length": 0.025, "actual_length": 0.015, "head_above_bench": 0.003,
              "support_stiffness": 100000.0, "support_damping": 300.0, "progress_ratio": 0.8}
  },
  "scenario": {
    "engage_step": 0.0001, "press_margin": 1.2, "settle_after_plan": 1.0,
    "final_settle": 2.0, "time_limit": 30.0,
    "disturbance": {"delay": 0.3, "ramp": 1.0, "hold": 0.5,
                    "direction": [0.3, 0, 0.95], "distance": 0.25,
                    "stiffness": 400.0, "damping": 20.0, "angular_damping": 2.0}
  }
})";

}  // namespace

TEST_CASE("a custom chain drives the scenario end to end") {
    const ScenarioConfig config = parse_config(kCustomChainScenario);
    const RunResult result = run_scenario(config);
    CHECK(result.exit_code == 0);
    CHECK_FALSE(result.report.diverged);
    CHECK(result.report.violation_count == 0);
    CHECK(result.report.contact_loss_time > 0.0);
    CHECK(result.report.max_disturbance_displacement > 0.02);
    CHECK(result.report.min_energy_scale < 1.0);
}

TEST_CASE("custom chain configurations round-trip semantically") {
    const ScenarioConfig config = parse_config(kCustomChainScenario);
    const ScenarioConfig again = parse_config(serialize_config(config));
    REQUIRE(again.model.custom.has_value());
    const ChainModel& a = *config.model.custom;
    const ChainModel& b = *again.model.custom;
    REQUIRE(a.dof() == b.dof());
    for (int i = 0; i < a.dof(); ++i) {
        const Joint& ja = a.joints[static_cast<size_t>(i)];
        const Joint& jb = b.joints[static_cast<size_t>(i)];
        CHECK((ja.axis - jb.axis).norm() < 1e-12);
        CHECK((ja.origin.rotation - jb.origin.rotation).norm() < 1e-12);
        CHECK((ja.origin.translation - jb.origin.translation).norm() < 1e-12);
        CHECK(ja.mass == doctest::Approx(jb.mass));
        CHECK((ja.com - jb.com).norm() < 1e-12);
        CHECK((ja.inertia - jb.inertia).norm() < 1e-12);
        CHECK(ja.effort_limit == doctest::Approx(jb.effort_limit));
    }
    CHECK((a.ee_offset.translation - b.ee_offset.translation).norm() < 1e-12);
    CHECK((a.gravity - b.gravity).norm() < 1e-12);
}

TEST_CASE("scenario runs are deterministic to the byte") {
    const ScenarioConfig config = load_config(preset("unscrew_energy_aware.json"));
    const auto dir_a = std::filesystem::temp_directory_path() / "eaic_det_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "eaic_det_b";
    RunOptions options;
    options.output_dir = dir_a.string();
    run_scenario(config, options);
    options.output_dir = dir_b.string();
    run_scenario(config, options);
    const std::string a = slurp(dir_a / "run.csv");
    const std::string b = slurp(dir_b / "run.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);
}

TEST_CASE("scenario hits its milestones and passes its invariants") {
    const RunResult& result = energy_aware_run();
    CHECK(result.exit_code == 0);
    CHECK(result.report.violation_count == 0);
    CHECK_FALSE(result.report.diverged);
    CHECK(result.report.contact_loss_time > 0.0);
    CHECK(result.report.min_tank_energy >= 0.5 - 1e-9);
    CHECK(result.report.max_disturbance_displacement > 0.05);

    // milestone order: engaged -> unscrewing -> contact_lost, absorbing
    bool seen_unscrewing = false, seen_lost = false;
    for (const auto& record : result.log) {
        if (record.screw_state == ScrewProcess::State::unscrewing) seen_unscrewing = true;
        if (record.screw_state == ScrewProcess::State::contact_lost) {
            CHECK(seen_unscrewing);
            seen_lost = true;
        } else {
            CHECK_FALSE(seen_lost);
        }
    }
    CHECK(seen_lost);

    // workbench contact stays unilateral over the whole run
    for (const auto& record : result.log) {
        CHECK(record.contact_force_z >= 0.0);
    }
}

TEST_CASE("steady unscrewing rides the screw quasi-statically") {
    const RunResult& result = energy_aware_run();
    const double rate = 0.0008 * 30.0;
    // steady window: unscrewing rows in the middle two quarters
    std::vector<const LogRecord*> rows;
    for (const auto& r : result.log) {
        if (r.screw_state == ScrewProcess::State::unscrewing) rows.push_back(&r);
    }
    REQUIRE(rows.size() > 100);
    const size_t a = rows.size() / 4, b = 3 * rows.size() / 4;
    // external axial force balances the press within 20%
    for (size_t i = a; i < b; ++i) {
        CHECK(rows[i]->external_force_z == doctest::Approx(1.2 * 15.0).epsilon(0.2));
    }
    // the ride tracks the drill rate
    const double dz = rows[b]->ee_position.z() - rows[a]->ee_position.z();
    const double dt_window = rows[b]->t - rows[a]->t;
    CHECK(dz / dt_window == doctest::Approx(rate).epsilon(0.1));
}

TEST_CASE("hybrid force loop settles on the engagement force") {
    const RunResult& result = hybrid_run();
    CHECK(result.exit_code == 0);
    std::vector<const LogRecord*> rows;
    for (const auto& r : result.log) {
        if (r.screw_state == ScrewProcess::State::unscrewing) rows.push_back(&r);
    }
    REQUIRE(rows.size() > 100);
    // settled tail of the unscrewing phase tracks -15 N within 5%
    for (size_t i = rows.size() / 2; i < rows.size(); ++i) {
        CHECK(rows[i]->external_force_z == doctest::Approx(15.0).epsilon(0.05));
    }
}

TEST_CASE("energy scale recovers only while the tank holds charge") {
    for (const char* name : {"unscrew_energy_aware.json", "tank_drain_hold.json"}) {
        const RunResult result = run_scenario(load_config(preset(name)));
        const double lower = load_config(preset(name)).controller.tank.lower;
        int rises = 0;
        for (size_t i = 1; i < result.log.size(); ++i) {
            if (result.log[i].diag.energy_scale >
                result.log[i - 1].diag.energy_scale + 1e-12) {
                ++rises;
                CHECK(result.log[i - 1].diag.tank_energy > lower - 1e-12);
            }
        }
        CHECK(rises > 0);
    }
}

TEST_CASE("report numbers are recomputable from the CSV log alone") {
    const ScenarioConfig config = load_config(preset("unscrew_energy_aware.json"));
    const auto dir = std::filesystem::temp_directory_path() / "eaic_audit";
    RunOptions options;
    options.output_dir = dir.string();
    const RunResult result = run_scenario(config, options);

    const CsvTable table = read_csv((dir / "run.csv").string());
    CHECK(table.rows.size() == result.log.size());
    const RunReport audited = report_from_csv(table, "energy_aware", true, true);

    const double tol = 1e-6;  // CSV carries 9 significant digits
    CHECK(audited.peak_impact_contact_loss ==
          doctest::Approx(result.report.peak_impact_contact_loss).epsilon(tol));
    CHECK(audited.peak_impact_after_release ==
          doctest::Approx(result.report.peak_impact_after_release).epsilon(tol));
    CHECK(audited.max_disturbance_displacement ==
          doctest::Approx(result.report.max_disturbance_displacement).epsilon(tol));
    CHECK(audited.min_tank_energy == doctest::Approx(result.report.min_tank_energy).epsilon(tol));
    CHECK(audited.min_energy_scale == doctest::Approx(result.report.min_energy_scale).epsilon(tol));
    CHECK(audited.max_damping_scale == doctest::Approx(result.report.max_damping_scale).epsilon(tol));
    CHECK(audited.contact_loss_time == doctest::Approx(result.report.contact_loss_time).epsilon(tol));
}

TEST_CASE("plot series extraction") {
    const ScenarioConfig config = load_config(preset("unscrew_impedance.json"));
    const auto dir = std::filesystem::temp_directory_path() / "eaic_plot";
    RunOptions options;
    options.output_dir = dir.string();
    const RunResult result = run_scenario(config, options);
    const std::string log_path = (dir / "run.csv").string();

    const auto series_path = (dir / "positions.csv").string();
    extract_plot_series(log_path, figure_columns("positions"), series_path);
    const CsvTable series = read_csv(series_path);
    CHECK(series.header == std::vector<std::string>{"t", "ee_x", "ee_y", "ee_z", "ee_zd"});
    CHECK(series.rows.size() == result.log.size());

    try {
        extract_plot_series(log_path, {"nope"}, (dir / "x.csv").string());
        FAIL("expected an error for the unknown column");
    } catch (const std::runtime_error& e) {
        const std::string message = e.what();
        CHECK(message.find("nope") != std::string::npos);
        CHECK(message.find("ee_z") != std::string::npos);  // lists available columns
    }
    CHECK_THROWS(figure_columns("rainbow"));

    // cross-column consistency: the first row with bench force also shows the
    // end-effector at or below the surface, and no earlier row dips below it
    const CsvTable table = read_csv(log_path);
    const int c_fc = table.column("f_contact_z");
    const int c_z = table.column("ee_z");
    const double bench_z = table.number(0, c_z) - config.world.screw.head_above_bench;
    bool found = false;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const bool below = table.number(i, c_z) < bench_z;
        const bool loaded = table.number(i, c_fc) > 0.0;
        if (loaded) {
            CHECK(below);
            found = true;
            break;
        }
        CHECK_FALSE(below);
    }
    CHECK(found);
}

TEST_CASE("compare requires identical worlds and reports reductions") {
    const ScenarioConfig imp = load_config(preset("unscrew_impedance.json"));
    const ScenarioConfig ea = load_config(preset("unscrew_energy_aware.json"));
    const ComparisonReport report = compare({imp, ea});
    CHECK(report.baseline == "impedance");
    CHECK(report.runs.size() == 2);

    // the baseline slams on both events; the energy-aware controller stays
    // under a fifth of it on both
    CHECK(report.runs[0].peak_impact_contact_loss > 0.0);
    CHECK(report.runs[0].peak_impact_after_release > 0.0);
    CHECK(report.runs[1].peak_impact_contact_loss <=
          0.2 * report.runs[0].peak_impact_contact_loss);
    CHECK(report.runs[1].peak_impact_after_release <=
          0.2 * report.runs[0].peak_impact_after_release);
    CHECK(report.contact_loss_reduction_pct[0] == doctest::Approx(0.0));
    const double expected = reduction_percent(report.runs[1].peak_impact_contact_loss,
                                              report.runs[0].peak_impact_contact_loss);
    CHECK(report.contact_loss_reduction_pct[1] == doctest::Approx(expected));

    // identical configurations differ by nothing
    const ComparisonReport same = compare({ea, ea});
    CHECK(same.runs[0].peak_impact_contact_loss ==
          doctest::Approx(same.runs[1].peak_impact_contact_loss));

    ScenarioConfig different = ea;
    different.world.bench.stiffness *= 2.0;
    CHECK_THROWS_AS(compare({imp, different}), std::invalid_argument);
}

TEST_CASE("divergence aborts with exit code 3 and a partial log") {
    const ScenarioConfig config = load_config(preset("unscrew_impedance.json"));
    RunOptions options;
    options.dt_override = 0.02;  // stiff screw support becomes unstable
    const RunResult result = run_scenario(config, options);
    CHECK(result.exit_code == 3);
    CHECK(result.report.diverged);
    CHECK(!result.log.empty());
}

TEST_CASE("reduction arithmetic") {
    CHECK(reduction_percent(1.2, 15.0) == doctest::Approx((1.0 - 1.2 / 15.0) * 100.0));
    CHECK(reduction_percent(5.0, 0.0) == 0.0);
}
