#pragma once

namespace eaic {

/// Virtual energy reservoir with hard bounds and an extraction-rate limit.
/// `p_lower` is the most negative power the controller may draw (W, < 0).
/// `drain_gate` (k) and `fill_gate` (j) record whether the respective bound
/// blocked the last flow; `power_scale` (gamma) is the last rate limit.
struct TankState {
    double energy = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double p_lower = 0.0;

    int drain_gate = 1;
    int fill_gate = 1;
    double power_scale = 1.0;

    bool at_lower() const { return energy <= lower; }
    bool at_upper() const { return energy >= upper; }
};

struct TankFlow {
    TankState tank;
    int drain_gate = 1;       // k: 0 when the tank is empty and draining
    int fill_gate = 1;        // j: 0 when the tank is full and filling
    double power_scale = 1.0; // gamma: P_lower / P_task when draining too fast
    double effective_power = 0.0;
};

/// One bookkeeping step. Gates are evaluated from the raw task power and the
/// pre-update energy, then the gated power is integrated and the result
/// clamped to the bounds, so the bound invariants hold exactly per step:
///
///   k = 0  iff  P <= 0 and E <= lower          (no further extraction)
///   j = 0  iff  P >= 0 and E >= upper          (no further storage)
///   gamma = P_lower / P  if  P < P_lower <= 0  (rate limit), else 1
///   effective P = gamma * k * P  if P <= 0, else j * P
TankFlow tank_step(const TankState& tank, double task_power, double dt);

}  // namespace eaic
