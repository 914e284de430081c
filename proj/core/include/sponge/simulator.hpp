#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sponge/dynamics.hpp"
#include "sponge/model.hpp"
#include "sponge/pneumatics.hpp"

namespace sponge {

/// Closed-loop digital twin of one robot.
///
/// Each tick runs, in order: controller (at time t), pneumatics, bellows
/// torques, chain dynamics; then t advances to the next multiple of dt.
/// Initial state: joints at rest at q = 0, supply line at its setpoint and
/// every bellows at the neutral pressure of its architecture.
class Simulator {
 public:
  /// Throws ConfigError listing every violation of `config`.
  explicit Simulator(TwinConfig config);

  const TwinConfig& config() const { return config_; }
  const ChainModel& chain() const { return chain_; }
  const RobotState& state() const { return state_; }
  RobotState& state() { return state_; }
  std::uint64_t ticks() const { return ticks_; }

  void set_supply_setpoint(double p_source_d) { p_source_d_ = p_source_d; }
  double supply_setpoint() const { return p_source_d_; }

  /// Closes every microvalve and bypasses the controller (leak testing).
  void force_valves_closed(bool closed) { valves_closed_ = closed; }

  /// Flow bookkeeping of the last tick (modular robot only).
  const std::optional<FlowReport>& last_flows() const { return last_flows_; }

  void tick(std::span<const double> q_d);

  /// Neutral bellows pressure of joint i.
  double neutral_pressure(std::size_t i) const;

 private:
  TwinConfig config_;
  ChainModel chain_;
  RobotState state_;
  std::vector<DelayLine> delays_;
  std::optional<FlowReport> last_flows_;
  double p_source_d_ = 0.0;
  bool valves_closed_ = false;
  std::uint64_t ticks_ = 0;
  std::vector<double> actuation_;
};

}  // namespace sponge
