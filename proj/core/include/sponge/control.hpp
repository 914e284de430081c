#pragma once

#include <span>

#include "sponge/model.hpp"

namespace sponge {

struct PiState {
  double integ = 0.0;
  bool saturated = false;
};

struct PiOutput {
  double command = 0.0;
  PiState state;
};

/// PI step with conditional-integration anti-windup.
///
/// The integrator is clamped to [integ_min, integ_max] and stops
/// integrating once the output reaches a limit while the error keeps
/// pushing into that limit. It may fill up to the saturation boundary but
/// never beyond it.
PiOutput pi_step(double error, const PiState& state, const PiGains& gains, double dt);

struct PressurePair {
  double p1 = 0.0;
  double p2 = 0.0;
};

/// p1 = p_stiff + dp/2, p2 = p_stiff - dp/2, each clamped to [0, p_max].
PressurePair split_pressures(double dp_d, double p_stiff, double p_max);

struct DutyPair {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// d1' = clamp(d1, 0, 1), d2' = clamp(d_stiff - d1', 0, 1).
DutyPair split_duties(double d1, double d_stiff);

/// Leading-edge PWM: high while the phase within the period is below `duty`.
int pwm_sample(double duty, double t, double f_pwm);

/// One controller cycle for all joints at time state.t.
///
/// Reads the encoder-quantized joint angles, runs the per-joint PI loops and
/// writes the integrators plus either the desired pressures `state.p_d`
/// (semi-modular) or the valve states `state.u` (modular). Every valve edge
/// increments `state.switch_count`.
void control_cycle(std::span<const double> q_d, RobotState& state, const ControlSettings& settings,
                   const RobotConfig& config);

}  // namespace sponge
