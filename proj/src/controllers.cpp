#include "eaic/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace eaic {

namespace {
constexpr double kPotentialFloor = 1e-12;
constexpr double kDampingFloor = 1e-9;
}  // namespace

EnergyScaleResult energy_scale_update(double total_energy, double kinetic, double potential_unscaled,
                                      double energy_limit, int drain_gate, double task_power_prev,
                                      double scale_prev) {
    EnergyScaleResult out;
    if (total_energy <= energy_limit && drain_gate != 0) {
        out.scale = 1.0;
        return out;
    }
    if (drain_gate == 0 && task_power_prev <= 0.0) {
        out.scale = scale_prev;
        return out;
    }
    out.scaling_branch = true;
    if (potential_unscaled <= kPotentialFloor) {
        out.scale = scale_prev;
        out.degenerate = true;
        return out;
    }
    out.scale = std::clamp((energy_limit - kinetic) / potential_unscaled, 0.0, 1.0);
    return out;
}

double motion_power(const Jac& j, const Wrench& w_base, const MatX& b_init,
                    const VecX& qdot, double power_scale) {
    const VecX spring_tau = power_scale * (j.transpose() * w_base.to6());
    return (spring_tau - b_init * qdot).dot(qdot);
}

DampingScaleResult damping_scale_update(double motion_power_value, double power_limit, const Jac& j,
                                        const Wrench& w_base, const MatX& b_init, const VecX& qdot,
                                        double power_scale) {
    DampingScaleResult out;
    if (motion_power_value <= power_limit) {
        return out;
    }
    const double damping_power = qdot.dot(b_init * qdot);
    if (damping_power < kDampingFloor) {
        out.degenerate = true;
        return out;
    }
    const double spring_power = (power_scale * (j.transpose() * w_base.to6())).dot(qdot);
    out.scale = (spring_power - power_limit) / damping_power;
    return out;
}

double task_power(const Wrench& w_base, const Twist& xdot) {
    return -wrench_twist_power(w_base, xdot);
}

ImpedanceController::ImpedanceController(StiffnessSet stiffness, MatX b_init)
    : stiffness_(std::move(stiffness)), b_init_(std::move(b_init)) {}

ControlOutput ImpedanceController::step(const ChainModel& model, const RobotState& state,
                                        const Transform& desired, const Wrench& /*measured_external*/,
                                        double /*dt*/) {
    const Transform current = forward_kinematics(model, state.q);
    const Jac j = jacobian(model, state.q);
    const SpringState spring{current, desired};
    const Wrench w_base = wrench_to_base(elastic_wrench(spring, stiffness_), current);
    const Twist xdot = Twist::from6(j * state.qdot, frames::base);

    ControlOutput out;
    out.tau = j.transpose() * w_base.to6() - b_init_ * state.qdot;
    out.diag.kinetic_energy = kinetic_coenergy(model, state);
    out.diag.potential_energy = potential_energy(spring, stiffness_);
    out.diag.total_energy = out.diag.kinetic_energy + out.diag.potential_energy;
    out.diag.task_power = task_power(w_base, xdot);
    out.diag.effective_task_power = out.diag.task_power;
    out.diag.damping_power = state.qdot.dot(b_init_ * state.qdot);
    out.diag.dissipation_power = out.diag.damping_power;
    out.diag.motion_power = motion_power(j, w_base, b_init_, state.qdot, 1.0);
    return out;
}

HybridController::HybridController(Params params) : params_(std::move(params)) {}

ControlOutput HybridController::step(const ChainModel& model, const RobotState& state,
                                     const Transform& desired, const Wrench& measured_external,
                                     double dt) {
    const Transform current = forward_kinematics(model, state.q);
    const Jac j = jacobian(model, state.q);
    const SpringState spring{current, desired};
    const Wrench w_spring = wrench_to_base(elastic_wrench(spring, params_.stiffness), current);
    const Twist xdot = Twist::from6(j * state.qdot, frames::base);

    // Applied-on-environment wrench is the reaction to the measured external
    // wrench; proportional loop on the tracking error.
    const Vec6 applied = -measured_external.to6();
    const Vec6 error = params_.desired_wrench - applied;
    const Vec6 force_cmd = params_.desired_wrench + params_.force_gain * error;

    Vec6 task = Vec6::Zero();
    for (int i = 0; i < 6; ++i) {
        task[i] = params_.axis_selection[i] > 0.5 ? force_cmd[i] : w_spring.to6()[i];
    }
    const Wrench w_task = Wrench::from6(task, frames::base);

    const double p_task = task_power(w_task, xdot);
    const TankFlow flow = tank_step(params_.tank, p_task, dt);
    params_.tank = flow.tank;

    // The tank meters energy leaving the controller: when the task drains,
    // the applied wrench carries the same gamma/k gating as the ledger.
    const double wrench_gate = p_task <= 0.0 ? flow.power_scale * flow.drain_gate : 1.0;
    const Wrench w_eff = w_task * wrench_gate;

    ControlOutput out;
    out.tau = j.transpose() * w_eff.to6() - params_.b_init * state.qdot;
    out.diag.power_scale = flow.power_scale;
    out.diag.drain_gate = flow.drain_gate;
    out.diag.fill_gate = flow.fill_gate;
    out.diag.tank_energy = params_.tank.energy;
    out.diag.task_power = p_task;
    out.diag.effective_task_power = flow.effective_power;
    out.diag.kinetic_energy = kinetic_coenergy(model, state);
    out.diag.potential_energy = potential_energy(spring, params_.stiffness);
    out.diag.total_energy = out.diag.kinetic_energy + out.diag.potential_energy;
    out.diag.damping_power = state.qdot.dot(params_.b_init * state.qdot);
    out.diag.dissipation_power = out.diag.damping_power;
    out.diag.motion_power = motion_power(j, w_eff, params_.b_init, state.qdot, 1.0);
    return out;
}

EnergyAwareController::EnergyAwareController(Params params)
    : params_(std::move(params)) {}

ControlOutput EnergyAwareController::step(const ChainModel& model, const RobotState& state,
                                          const Transform& desired, const Wrench& /*measured_external*/,
                                          double dt) {
    const Transform current = forward_kinematics(model, state.q);
    const Jac j = jacobian(model, state.q);
    const SpringState spring{current, desired};

    const double kinetic = kinetic_coenergy(model, state);
    const double potential_unscaled = potential_energy(spring, params_.stiffness.scaled(1.0));

    // Gate view for the hold rule: the freshest tank level with the task
    // power of the previous step. Evaluating the gate here (instead of
    // reusing the one recorded by the last tank update) keeps the hold
    // exact on the step where draining just reached the lower bound.
    const int drain_gate_now = (last_task_power_ <= 0.0 && params_.tank.at_lower()) ? 0 : 1;

    const EnergyScaleResult scale = energy_scale_update(kinetic + potential_unscaled, kinetic,
                                                        potential_unscaled, params_.energy_limit,
                                                        drain_gate_now, last_task_power_, energy_scale_);
    energy_scale_ = scale.scale;

    const StiffnessSet active = params_.stiffness.scaled(energy_scale_);
    const Wrench w_base = wrench_to_base(elastic_wrench(spring, active), current);
    const Twist xdot = Twist::from6(j * state.qdot, frames::base);

    const double p_task = task_power(w_base, xdot);
    const TankFlow flow = tank_step(params_.tank, p_task, dt);
    params_.tank = flow.tank;
    last_task_power_ = p_task;

    const double p_motion = motion_power(j, w_base, params_.b_init, state.qdot, flow.power_scale);
    const DampingScaleResult damping = damping_scale_update(p_motion, params_.power_limit, j, w_base,
                                                            params_.b_init, state.qdot, flow.power_scale);

    ControlOutput out;
    out.tau = flow.power_scale * (j.transpose() * w_base.to6()) -
              damping.scale * (params_.b_init * state.qdot);
    out.diag.energy_scale = energy_scale_;
    out.diag.damping_scale = damping.scale;
    out.diag.power_scale = flow.power_scale;
    out.diag.drain_gate = flow.drain_gate;
    out.diag.fill_gate = flow.fill_gate;
    out.diag.tank_energy = params_.tank.energy;
    out.diag.task_power = p_task;
    out.diag.effective_task_power = flow.effective_power;
    out.diag.motion_power = p_motion;
    out.diag.damping_power = state.qdot.dot(params_.b_init * state.qdot);
    out.diag.dissipation_power = damping.scale * out.diag.damping_power;
    out.diag.kinetic_energy = kinetic;
    out.diag.potential_energy = energy_scale_ * potential_unscaled;
    out.diag.total_energy = kinetic + out.diag.potential_energy;
    out.diag.scaling_branch = scale.scaling_branch;
    out.diag.degenerate_scale = scale.degenerate;
    out.diag.degenerate_damping = damping.degenerate;
    return out;
}

}  // namespace eaic
