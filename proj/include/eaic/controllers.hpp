#pragma once

#include "eaic/chain.hpp"
#include "eaic/spring.hpp"
#include "eaic/tank.hpp"

#include <memory>

namespace eaic {

/// Per-step controller diagnostics. Scales default to their inactive values
/// so baseline controllers report them without owning the machinery.
struct ControlDiagnostics {
    double energy_scale = 1.0;   // lambda
    double damping_scale = 1.0;  // beta
    double power_scale = 1.0;    // gamma
    int drain_gate = 1;          // k
    int fill_gate = 1;           // j
    double tank_energy = 0.0;
    double task_power = 0.0;           // raw -w . xdot before gating
    double effective_task_power = 0.0; // after gamma/k/j gating
    double motion_power = 0.0;         // monitored value before damping injection
    double damping_power = 0.0;        // qdot^T B_init qdot
    double dissipation_power = 0.0;    // qdot^T (beta B_init) qdot actually dissipated
    double total_energy = 0.0;         // T + scaled U
    double kinetic_energy = 0.0;
    double potential_energy = 0.0;     // scaled spring potential
    bool scaling_branch = false;       // energy_scale came from the limit formula
    bool degenerate_scale = false;     // limit formula hit U ~ 0
    bool degenerate_damping = false;   // damping formula hit qdot ~ 0
};

struct ControlOutput {
    VecX tau;
    ControlDiagnostics diag;
};

/// Energy scaling factor. Branch order follows the discrete update used
/// throughout: full scale while total energy fits the budget and the tank
/// gate is open; hold the previous value while the tank is empty and the
/// task still drains; otherwise solve (limit - T) / U so that T + scale * U
/// equals the limit exactly. U is the unscaled spring potential. The result
/// is clamped to [0, 1].
struct EnergyScaleResult {
    double scale = 1.0;
    bool scaling_branch = false;
    bool degenerate = false;
};
EnergyScaleResult energy_scale_update(double total_energy, double kinetic, double potential_unscaled,
                                      double energy_limit, int drain_gate, double task_power_prev,
                                      double scale_prev);

/// Motion power (gamma Jt w - B qdot) . qdot.
double motion_power(const Jac& j, const Wrench& w_base, const MatX& b_init,
                    const VecX& qdot, double power_scale);

/// Damping injection factor: 1 below the power limit, otherwise the factor
/// that brings the recomputed motion power back to the limit. Degenerate at
/// qdot ~ 0 where damping cannot dissipate.
struct DampingScaleResult {
    double scale = 1.0;
    bool degenerate = false;
};
DampingScaleResult damping_scale_update(double motion_power_value, double power_limit, const Jac& j,
                                        const Wrench& w_base, const MatX& b_init, const VecX& qdot,
                                        double power_scale);

/// Task power demand -w . xdot; negative when the spring feeds energy into
/// the robot (the tank drains).
double task_power(const Wrench& w_base, const Twist& xdot);

class Controller {
public:
    virtual ~Controller() = default;
    /// Compute the control torque. `measured_external` is the external
    /// wrench estimate at the end-effector in base coordinates (used by the
    /// force loop of the hybrid controller, ignored by the others).
    virtual ControlOutput step(const ChainModel& model, const RobotState& state,
                               const Transform& desired, const Wrench& measured_external,
                               double dt) = 0;
};

/// tau = Jt w - B_init qdot with fixed gains.
class ImpedanceController : public Controller {
public:
    ImpedanceController(StiffnessSet stiffness, MatX b_init);
    ControlOutput step(const ChainModel& model, const RobotState& state, const Transform& desired,
                       const Wrench& measured_external, double dt) override;

private:
    StiffnessSet stiffness_;
    MatX b_init_;
};

/// Force control on selected axes, spring on the rest, with the combined
/// task wrench metered through the energy tank. When the task drains the
/// tank the applied wrench is scaled by gamma and the empty-tank gate.
class HybridController : public Controller {
public:
    struct Params {
        Vec6 axis_selection = Vec6::Zero();  // 1 on force-controlled axes
        Vec6 desired_wrench = Vec6::Zero();  // force to apply onto the environment
        double force_gain = 2.0;
        StiffnessSet stiffness;
        MatX b_init;
        TankState tank;
    };
    explicit HybridController(Params params);
    ControlOutput step(const ChainModel& model, const RobotState& state, const Transform& desired,
                       const Wrench& measured_external, double dt) override;
    const TankState& tank() const { return params_.tank; }

private:
    Params params_;
};

/// Impedance control with an energy budget, damping injection and a
/// power-flow-limited energy tank. Per step: update the energy scale from
/// the current kinetic and unscaled potential energy, rescale the spring
/// and recompute its wrench, meter the task power through the tank to get
/// gamma and the gates, then bound the motion power via damping injection:
///
///   tau = gamma Jt w - beta B_init qdot
class EnergyAwareController : public Controller {
public:
    struct Params {
        StiffnessSet stiffness;   // unscaled baseline
        MatX b_init;
        double energy_limit = 0.0;
        double power_limit = 0.0;
        TankState tank;
    };
    explicit EnergyAwareController(Params params);
    ControlOutput step(const ChainModel& model, const RobotState& state, const Transform& desired,
                       const Wrench& measured_external, double dt) override;
    const TankState& tank() const { return params_.tank; }
    double energy_scale() const { return energy_scale_; }

private:
    Params params_;
    double energy_scale_ = 1.0;
    double last_task_power_ = 0.0;
};

}  // namespace eaic
