#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "sponge/model.hpp"

namespace sponge {

// Linear-conductance pneumatics: every flow is volumetric (m³/s) at the
// 1 bar reference and proportional to a gauge pressure difference. Volumes
// are isothermal lumped capacitances, dp/dt = q * p_ref / V.

struct ValveFlow {
  double q_in = 0.0;    // supply -> bellows; negative when the bellows back-feeds
  double q_vent = 0.0;  // bellows -> atmosphere
};

/// 3/2-way normally closed microvalve. Open (u = 1) connects port 1 (supply)
/// to the bellows; closed (u = 0) vents the bellows through port 3.
ValveFlow binary_valve_flow(int u, double p_s, double p_b, double conductance);

/// Fixed-length transport delay, one slot per simulation step.
class DelayLine {
 public:
  DelayLine(std::size_t steps, double initial);
  static DelayLine for_dead_time(double dead_time, double dt, double initial);

  /// Pushes `value` and returns the value pushed `steps()` calls earlier.
  double push(double value);
  std::size_t steps() const { return buffer_.size(); }

 private:
  std::deque<double> buffer_;
};

/// Proportional valve with integrated pressure control: the setpoint is
/// quantized to the valve resolution, delayed by the tube's dead time, then
/// tracked by a first-order lag.
double proportional_valve_step(double p_b, double p_d, const ProportionalValveSpec& spec,
                               DelayLine& history, double dt);

/// Regulator flow into the supply line, limited to q_src_max.
double regulated_source_flow(double p_s, double p_source_d, const SupplySpec& spec);

double supply_step(double p_s, double p_source_d, double draw, const SupplySpec& spec, double dt);

double bellows_pressure_step(double p_b, double q_net, double volume, double dt);

/// Flow bookkeeping for one step of the modular network.
struct FlowReport {
  double q_src = 0.0;
  double q_leak = 0.0;
  std::vector<double> q_in;
  std::vector<double> q_vent;
  /// d/dt of the air stored in the supply line over the step.
  double line_storage_rate = 0.0;

  double total_in() const;
  /// q_src - q_leak - sum(q_in) - line_storage_rate, relative to the largest term.
  double relative_imbalance() const;
};

/// Advances supply line and all 2n bellows of the modular robot by one step
/// using the valve states in `state.u`.
FlowReport binary_network_step(const RobotConfig& config, RobotState& state, double p_source_d);

}  // namespace sponge
