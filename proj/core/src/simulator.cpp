#include "sponge/simulator.hpp"

#include <algorithm>

#include "sponge/control.hpp"
#include "sponge/errors.hpp"

namespace sponge {

namespace {

void require_valid(const TwinConfig& config) {
  const auto violations = validate(config);
  if (violations.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.rule;
  throw ConfigError(msg);
}

}  // namespace

Simulator::Simulator(TwinConfig config) : config_(std::move(config)) {
  require_valid(config_);
  chain_ = ChainModel::from_config(config_.robot);
  const std::size_t n = config_.robot.n();
  state_ = RobotState::zero(n);
  p_source_d_ = config_.robot.supply.p_source_d;
  state_.p_s = p_source_d_;
  actuation_.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const double p0 = neutral_pressure(i);
    for (std::size_t k : {2 * i, 2 * i + 1}) {
      state_.p[k] = p0;
      state_.p_d[k] = p0;
    }
    if (const auto* pv = std::get_if<ProportionalValveSpec>(&config_.robot.actuators[i].valve)) {
      // Tube length, and with it the dead time, grows with the joint index.
      const double dead_time = static_cast<double>(i + 1) * pv->dead_time_per_stage;
      for (int side = 0; side < 2; ++side) {
        delays_.push_back(DelayLine::for_dead_time(dead_time, config_.robot.dt, p0));
      }
    }
  }
}

double Simulator::neutral_pressure(std::size_t i) const {
  const ActuatorSpec& a = config_.robot.actuators[i];
  if (a.variant == Variant::SemiModular) {
    return config_.control.p_stiff.value_or(a.bellows.p_max / 2.0);
  }
  return std::min(config_.control.d_stiff / 2.0, 1.0) * config_.robot.supply.p_source_d;
}

void Simulator::tick(std::span<const double> q_d) {
  const RobotConfig& robot = config_.robot;
  const std::size_t n = robot.n();
  const double dt = robot.dt;

  if (valves_closed_) {
    if (q_d.size() != n) throw ConfigError("tick: dimension mismatch");
    for (std::size_t k = 0; k < 2 * n; ++k) {
      if (state_.u[k] != 0) ++state_.switch_count[k];
      state_.u[k] = 0;
    }
  } else {
    control_cycle(q_d, state_, config_.control, robot);
  }

  if (robot.variant() == Variant::Modular) {
    last_flows_ = binary_network_step(robot, state_, p_source_d_);
  } else {
    state_.p_s = supply_step(state_.p_s, p_source_d_, 0.0, robot.supply, dt);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const auto& pv = std::get<ProportionalValveSpec>(robot.actuators[k / 2].valve);
      const double target = valves_closed_ ? 0.0 : state_.p_d[k];
      const double next = proportional_valve_step(state_.p[k], target, pv, delays_[k], dt);
      state_.p[k] = std::clamp(next, 0.0, std::max(state_.p_s, 0.0));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    actuation_[i] = bellows_torque(state_.p[2 * i], state_.p[2 * i + 1], state_.q[i], 0.0,
                                   robot.actuators[i].bellows);
  }
  step_dynamics(state_, actuation_, chain_, dt);

  ++ticks_;
  state_.t = static_cast<double>(ticks_) * dt;
}

}  // namespace sponge
