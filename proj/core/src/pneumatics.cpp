#include "sponge/pneumatics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sponge/errors.hpp"
#include "sponge/units.hpp"

namespace sponge {

using units::kRefPressureBar;

ValveFlow binary_valve_flow(int u, double p_s, double p_b, double conductance) {
  if (conductance < 0.0) throw ConfigError("valve conductance must be >= 0");
  if (u != 0 && u != 1) throw ConfigError("binary valve state must be 0 or 1");
  if (u == 1) return {conductance * (p_s - p_b), 0.0};
  return {0.0, conductance * p_b};
}

DelayLine::DelayLine(std::size_t steps, double initial) : buffer_(steps, initial) {}

DelayLine DelayLine::for_dead_time(double dead_time, double dt, double initial) {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (dead_time < 0.0) throw ConfigError("dead time must be >= 0");
  return DelayLine(static_cast<std::size_t>(std::lround(dead_time / dt)), initial);
}

double DelayLine::push(double value) {
  if (buffer_.empty()) return value;
  buffer_.push_back(value);
  const double out = buffer_.front();
  buffer_.pop_front();
  return out;
}

double proportional_valve_step(double p_b, double p_d, const ProportionalValveSpec& spec,
                               DelayLine& history, double dt) {
  if (!(spec.tau > 0.0)) throw ConfigError("proportional valve tau must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  double setpoint = p_d;
  if (spec.resolution > 0.0) setpoint = std::round(p_d / spec.resolution) * spec.resolution;
  const double delayed = history.push(setpoint);
  return p_b + (dt / spec.tau) * (delayed - p_b);
}

double regulated_source_flow(double p_s, double p_source_d, const SupplySpec& spec) {
  const double wanted = (p_source_d - p_s) / spec.tau_src * spec.line_volume / kRefPressureBar;
  return std::min(spec.q_src_max, wanted);
}

double supply_step(double p_s, double p_source_d, double draw, const SupplySpec& spec,
                   double dt) {
  if (!(spec.line_volume > 0.0)) throw ConfigError("supply line volume must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  const double q_src = regulated_source_flow(p_s, p_source_d, spec);
  const double q_leak = spec.g_leak * p_s;
  return p_s + dt * (q_src - q_leak - draw) * (kRefPressureBar / spec.line_volume);
}

double bellows_pressure_step(double p_b, double q_net, double volume, double dt) {
  return std::max(0.0, p_b + dt * q_net * kRefPressureBar / volume);
}

double FlowReport::total_in() const { return std::accumulate(q_in.begin(), q_in.end(), 0.0); }

double FlowReport::relative_imbalance() const {
  const double sum_in = total_in();
  double scale = std::max({std::abs(q_src), std::abs(q_leak), std::abs(line_storage_rate)});
  for (double q : q_in) scale = std::max(scale, std::abs(q));
  const double residual = q_src - q_leak - sum_in - line_storage_rate;
  if (scale == 0.0) return std::abs(residual);
  return std::abs(residual) / scale;
}

FlowReport binary_network_step(const RobotConfig& config, RobotState& state,
                               double p_source_d) {
  const std::size_t m = 2 * config.n();
  if (state.p.size() != m || state.u.size() != m) {
    throw ConfigError("state dimensions do not match the robot");
  }
  const double dt = config.dt;
  FlowReport r;
  r.q_in.resize(m);
  r.q_vent.resize(m);

  for (std::size_t k = 0; k < m; ++k) {
    const ActuatorSpec& a = config.actuators[k / 2];
    const auto& valve = std::get<BinaryValveSpec>(a.valve);
    const ValveFlow f = binary_valve_flow(state.u[k], state.p_s, state.p[k], valve.conductance);
    r.q_in[k] = f.q_in;
    r.q_vent[k] = f.q_vent;
  }

  const SupplySpec& s = config.supply;
  r.q_src = regulated_source_flow(state.p_s, p_source_d, s);
  r.q_leak = s.g_leak * state.p_s;
  const double draw = r.total_in();
  const double p_s_next = supply_step(state.p_s, p_source_d, draw, s, dt);
  r.line_storage_rate = (p_s_next - state.p_s) * s.line_volume / (kRefPressureBar * dt);

  for (std::size_t k = 0; k < m; ++k) {
    const double volume = config.actuators[k / 2].bellows.volume;
    state.p[k] = bellows_pressure_step(state.p[k], r.q_in[k] - r.q_vent[k], volume, dt);
  }
  state.p_s = p_s_next;
  return r;
}

}  // namespace sponge
