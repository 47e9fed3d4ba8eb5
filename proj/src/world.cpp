#include "eaic/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace eaic {

const char* ScrewProcess::state_name(State s) {
    switch (s) {
        case State::idle: return "idle";
        case State::engaged: return "engaged";
        case State::unscrewing: return "unscrewing";
        case State::contact_lost: return "contact_lost";
        case State::done: return "done";
    }
    return "?";
}

void screw_step(ScrewProcess& screw, double axial_force, bool drill_on, double dt) {
    switch (screw.state) {
        case ScrewProcess::State::idle:
        case ScrewProcess::State::contact_lost:
        case ScrewProcess::State::done:
            return;
        case ScrewProcess::State::engaged:
            if (drill_on && axial_force <= -screw.engage_force) {
                screw.state = ScrewProcess::State::unscrewing;
            }
            return;
        case ScrewProcess::State::unscrewing: {
            // Driving stalls when the pressing force drops too far, but the
            // state is kept; the bit is still seated.
            if (drill_on && axial_force <= -screw.progress_ratio * screw.engage_force) {
                const double advance = screw.pitch * screw.speed * dt;
                screw.travel += advance;
                screw.head_z += advance;
            }
            if (screw.travel >= screw.actual_length) {
                screw.state = screw.actual_length < screw.nominal_length
                                  ? ScrewProcess::State::contact_lost
                                  : ScrewProcess::State::done;
            }
            return;
        }
    }
}

double ContactState::force(double ee_z, double ee_vz) const {
    const double penetration = bench_z - ee_z;
    if (penetration <= 0.0) return 0.0;
    return std::max(0.0, stiffness * penetration - damping * ee_vz);
}

Wrench DisturbanceEntry::wrench(double t, const Vec3& ee_position, const Twist& ee_velocity) const {
    Wrench w;
    w.frame = frames::base;
    if (!active(t)) return w;
    const double progress = std::min(1.0, (t - t_start) / ramp);
    const Vec3 grab = anchor + direction * (distance * progress);
    w.force = stiffness * (grab - ee_position) - damping * ee_velocity.linear;
    w.moment = -angular_damping * ee_velocity.angular;
    return w;
}

void DisturbanceSchedule::add(const DisturbanceEntry& entry) {
    for (const auto& existing : entries) {
        const bool disjoint = entry.t_start >= existing.t_end() || entry.t_end() <= existing.t_start;
        if (!disjoint) throw std::invalid_argument("DisturbanceSchedule: overlapping windows");
    }
    entries.push_back(entry);
}

const DisturbanceEntry* DisturbanceSchedule::active(double t) const {
    for (const auto& entry : entries) {
        if (entry.active(t)) return &entry;
    }
    return nullptr;
}

ExternalForces external_wrench(const SimWorld& world) {
    const Transform ee = forward_kinematics(world.model, world.robot.q);
    const Twist xdot = ee_twist(world.model, world.robot);
    const double t = world.time();

    ExternalForces out;
    out.total.frame = frames::base;
    out.disturbance.frame = frames::base;

    if (world.screw.supports()) {
        const double penetration = world.screw.head_z - ee.translation.z();
        if (penetration > 0.0) {
            out.screw_z = std::max(0.0, world.screw.support_stiffness * penetration -
                                            world.screw.support_damping * xdot.linear.z());
        }
    }
    out.contact_z = world.contact.force(ee.translation.z(), xdot.linear.z());

    if (const DisturbanceEntry* entry = world.disturbances.active(t)) {
        out.disturbance = entry->wrench(t, ee.translation, xdot);
    }

    out.total.force = out.disturbance.force + Vec3(0.0, 0.0, out.screw_z + out.contact_z);
    out.total.moment = out.disturbance.moment;
    return out;
}

StepResult world_step(SimWorld& world, const ControlOutput& control, double desired_z) {
    const int n = world.model.dof();
    if (!control.tau.allFinite()) throw std::invalid_argument("world_step: non-finite control torque");

    const Transform ee = forward_kinematics(world.model, world.robot.q);
    const Twist xdot = ee_twist(world.model, world.robot);
    const Jac j = jacobian(world.model, world.robot.q);
    const ExternalForces ext = external_wrench(world);

    // The record snapshots the instant the forces act: plant state, applied
    // wrenches and controller diagnostics all at the pre-step time.
    StepResult result;
    result.record.t = world.time();
    result.record.q = world.robot.q;
    result.record.qdot = world.robot.qdot;
    result.record.ee_position = ee.translation;
    result.record.desired_z = desired_z;
    result.record.external_force_z = ext.total.force.z();
    result.record.contact_force_z = ext.contact_z;
    result.record.diag = control.diag;
    result.record.screw_state = world.screw.state;

    VecX tau_cmd = control.tau + gravity_vector(world.model, world.robot.q);
    for (int i = 0; i < n; ++i) {
        const double limit = world.model.joints[static_cast<size_t>(i)].effort_limit;
        tau_cmd[i] = std::clamp(tau_cmd[i], -limit, limit);
    }
    const VecX tau_plant = tau_cmd + j.transpose() * ext.total.to6();

    const VecX qddot = forward_dynamics(world.model, world.robot, tau_plant);
    world.robot.qdot += world.dt * qddot;
    world.robot.q += world.dt * world.robot.qdot;

    for (int i = 0; i < n; ++i) {
        const Joint& joint = world.model.joints[static_cast<size_t>(i)];
        if (world.robot.q[i] < joint.position_lower || world.robot.q[i] > joint.position_upper) {
            world.robot.q[i] = std::clamp(world.robot.q[i], joint.position_lower, joint.position_upper);
            world.robot.qdot[i] = 0.0;
            if (world.limit_clamp_count == 0) {
                std::fprintf(stderr, "warning: joint %d clamped to its position limit at t=%.3f\n",
                             i, world.time());
            }
            ++world.limit_clamp_count;
        }
    }

    // The tool pushes on the screw with the reaction to the support force.
    screw_step(world.screw, -ext.screw_z, world.drill_on, world.dt);
    world.contact.last_penetration = std::max(0.0, world.contact.bench_z - ee.translation.z());
    world.contact.last_force = ext.contact_z;

    ++world.step_count;

    result.diverged = world.robot.qdot.cwiseAbs().maxCoeff() > world.divergence_limit;
    return result;
}

double peak_impact_force(const std::vector<LogRecord>& log, double t0, double t1) {
    double peak = 0.0;
    for (const auto& record : log) {
        if (record.t < t0 || record.t > t1) continue;
        peak = std::max(peak, std::abs(record.contact_force_z));
    }
    return peak;
}

}  // namespace eaic
