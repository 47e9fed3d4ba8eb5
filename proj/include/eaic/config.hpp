#pragma once

#include "eaic/chain.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eaic {

struct ConfigIssue {
    std::string key;
    std::string reason;
};

/// Carries every issue found while validating a configuration file.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct TankConfig {
    double initial = 3.0;
    double upper = 5.0;
    double lower = 0.5;
    double extraction_limit = -0.175;
};

struct ControllerConfig {
    std::string kind;  // impedance | hybrid | energy_aware
    double stiffness_translational = 900.0;
    double stiffness_rotational = 40.0;
    double stiffness_coupling = 0.0;
    double damping_initial = 5.0;  // B = damping_initial * I_n

    // energy_aware
    double energy_limit = 0.7;
    double power_limit = 0.5;

    // hybrid
    double desired_force_z = -15.0;
    double force_gain = 2.0;

    TankConfig tank;  // energy_aware and hybrid
};

struct BenchConfig {
    double stiffness = 1e5;
    double damping = 300.0;
};

struct ScrewConfig {
    double pitch = 0.0008;
    double speed_rps = 5.0;
    double engage_force = 15.0;
    double nominal_length = 0.025;
    double actual_length = 0.015;
    double head_above_bench = 0.0;
    double support_stiffness = 1e5;
    double support_damping = 300.0;
    double progress_ratio = 0.8;
};

struct WorldConfig {
    double dt = 1e-3;
    BenchConfig bench;
    ScrewConfig screw;
};

struct DisturbanceConfig {
    double delay = 0.5;
    double ramp = 1.5;
    double hold = 1.0;
    Vec3 direction = Vec3(1.0, 0.0, 0.0);
    double distance = 0.4;
    double stiffness = 1000.0;
    double damping = 20.0;
    double angular_damping = 0.0;
};

struct PhaseConfig {
    double engage_step = 1e-4;     // m of desired-pose descent per control step
    double press_margin = 1.2;     // press to margin * engage_force before driving
    double settle_after_plan = 1.5;
    DisturbanceConfig disturbance;
    double final_settle = 4.0;
    double time_limit = 120.0;     // hard cap on a run
};

struct ModelConfig {
    std::string kind;  // panda7 | planar3 | custom
    VecX q0;
    std::optional<ChainModel> custom;
};

struct OutputConfig {
    std::string log = "run.csv";
    std::string report = "report.json";
};

struct ScenarioConfig {
    ModelConfig model;
    ControllerConfig controller;
    WorldConfig world;
    PhaseConfig scenario;
    OutputConfig output;

    ChainModel make_model() const;
};

/// Parse and validate; throws config_error with one entry per problem
/// (missing key, type mismatch, unknown key, bound violation).
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);
std::string serialize_config(const ScenarioConfig& config);

}  // namespace eaic
