#include "eaic/tank.hpp"

#include <algorithm>

namespace eaic {

TankFlow tank_step(const TankState& tank, double task_power, double dt) {
    TankFlow flow;
    flow.drain_gate = (task_power <= 0.0 && tank.at_lower()) ? 0 : 1;
    flow.fill_gate = (task_power >= 0.0 && tank.at_upper()) ? 0 : 1;
    flow.power_scale = (task_power < tank.p_lower && tank.p_lower <= 0.0)
                           ? tank.p_lower / task_power
                           : 1.0;
    flow.effective_power = (task_power <= 0.0)
                               ? flow.power_scale * flow.drain_gate * task_power
                               : flow.fill_gate * task_power;

    flow.tank = tank;
    flow.tank.energy = std::clamp(tank.energy + flow.effective_power * dt, tank.lower, tank.upper);
    flow.tank.drain_gate = flow.drain_gate;
    flow.tank.fill_gate = flow.fill_gate;
    flow.tank.power_scale = flow.power_scale;
    return flow;
}

}  // namespace eaic
