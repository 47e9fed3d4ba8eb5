#pragma once

#include "eaic/chain.hpp"
#include "eaic/controllers.hpp"

#include <string>
#include <vector>

namespace eaic {

/// Screw being driven out along the base z-axis. The head acts as a
/// unilateral support at `head_z` while engaged; the flaw is an actual
/// length shorter than the nominal one the planner assumes, so the shaft
/// lets go early. State machine edges:
///   engaged -> unscrewing     drill on and axial force <= -engage_force
///   unscrewing -> contact_lost  travel reaches the actual length (flawed)
///   unscrewing -> done          travel reaches the nominal length (clean)
/// contact_lost and done are absorbing; the screw exerts no reaction there.
struct ScrewProcess {
    enum class State { idle, engaged, unscrewing, contact_lost, done };

    double head_z = 0.0;
    double pitch = 0.0008;      // m per revolution
    double speed = 5.0;         // revolutions per second while driven
    double engage_force = 15.0; // N pressing force required
    double nominal_length = 0.025;
    double actual_length = 0.025;
    double travel = 0.0;
    State state = State::idle;

    /// Fraction of the engagement force below which driving stalls without
    /// leaving the unscrewing state.
    double progress_ratio = 0.8;
    // Penalty parameters of the head support.
    double support_stiffness = 1e5;
    double support_damping = 300.0;

    bool supports() const { return state == State::engaged || state == State::unscrewing; }
    static const char* state_name(State s);
};

/// Advance the screw by one step. `axial_force` is the force the tool
/// applies onto the screw along z (negative when pressing down).
void screw_step(ScrewProcess& screw, double axial_force, bool drill_on, double dt);

/// Unilateral penalty contact with the workbench surface.
struct ContactState {
    double bench_z = 0.0;
    double stiffness = 1e5;
    double damping = 300.0;

    double last_penetration = 0.0;
    double last_force = 0.0;

    /// Upward force; zero without penetration, never negative.
    double force(double ee_z, double ee_vz) const;
};

/// A grab spring to a moving point: ramps away from the anchor along a
/// direction, holds, then releases cleanly (the wrench vanishes).
struct DisturbanceEntry {
    double t_start = 0.0;
    double ramp = 1.0;
    double hold = 1.0;
    Vec3 direction = Vec3::UnitX();
    double distance = 0.0;
    double stiffness = 0.0;
    double damping = 0.0;
    double angular_damping = 0.0;  // the grip steadies the tool orientation
    Vec3 anchor = Vec3::Zero();

    double t_end() const { return t_start + ramp + hold; }
    bool active(double t) const { return t >= t_start && t < t_end(); }
    Wrench wrench(double t, const Vec3& ee_position, const Twist& ee_velocity) const;
};

struct DisturbanceSchedule {
    std::vector<DisturbanceEntry> entries;
    void add(const DisturbanceEntry& entry);  // rejects overlapping windows
    const DisturbanceEntry* active(double t) const;
};

/// One row of the run log; carries everything the CSV stream, the report
/// builder and the acceptance checks consume.
struct LogRecord {
    double t = 0.0;
    VecX q;
    VecX qdot;
    Vec3 ee_position = Vec3::Zero();
    double desired_z = 0.0;
    double external_force_z = 0.0;
    double contact_force_z = 0.0;
    ControlDiagnostics diag;
    ScrewProcess::State screw_state = ScrewProcess::State::idle;
};

struct SimWorld {
    ChainModel model;
    RobotState robot;
    ScrewProcess screw;
    ContactState contact;
    DisturbanceSchedule disturbances;
    double dt = 1e-3;
    long step_count = 0;
    bool drill_on = false;
    int limit_clamp_count = 0;
    double divergence_limit = 20.0;  // rad/s

    double time() const { return static_cast<double>(step_count) * dt; }
};

struct ExternalForces {
    Wrench total;       // base frame, referenced at the end-effector
    double screw_z = 0.0;
    double contact_z = 0.0;
    Wrench disturbance; // base frame
};

/// Sum of screw reaction, workbench penalty and the active disturbance at
/// the current state.
ExternalForces external_wrench(const SimWorld& world);

struct StepResult {
    LogRecord record;
    bool diverged = false;
};

/// One fixed step: total torque = control + gravity compensation + Jt times
/// the external wrench, semi-implicit Euler on the plant, then the screw and
/// contact bookkeeping advance. Commanded actuator torque (control plus
/// gravity compensation) saturates at the joint effort limits.
StepResult world_step(SimWorld& world, const ControlOutput& control, double desired_z);

/// Maximum workbench force magnitude within [t0, t1].
double peak_impact_force(const std::vector<LogRecord>& log, double t0, double t1);

}  // namespace eaic
