#include "sponge/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sponge/dynamics.hpp"
#include "sponge/errors.hpp"

namespace sponge {

PiOutput pi_step(double error, const PiState& state, const PiGains& gains, double dt) {
  const double proportional = gains.kp * error;
  double integ = std::clamp(state.integ + gains.ki * error * dt, gains.integ_min, gains.integ_max);
  if (error > 0.0) {
    integ = std::min(integ, std::max(state.integ, gains.out_max - proportional));
  } else if (error < 0.0) {
    integ = std::max(integ, std::min(state.integ, gains.out_min - proportional));
  }
  const double raw = proportional + integ;
  PiOutput out;
  out.command = std::clamp(raw, gains.out_min, gains.out_max);
  out.state.integ = integ;
  out.state.saturated = raw >= gains.out_max || raw <= gains.out_min;
  return out;
}

PressurePair split_pressures(double dp_d, double p_stiff, double p_max) {
  return {std::clamp(p_stiff + dp_d / 2.0, 0.0, p_max),
          std::clamp(p_stiff - dp_d / 2.0, 0.0, p_max)};
}

DutyPair split_duties(double d1, double d_stiff) {
  const double first = std::clamp(d1, 0.0, 1.0);
  return {first, std::clamp(d_stiff - first, 0.0, 1.0)};
}

int pwm_sample(double duty, double t, double f_pwm) {
  if (duty >= 1.0) return 1;
  if (duty <= 0.0) return 0;
  const double cycles = t * f_pwm;
  double phase = cycles - std::floor(cycles);
  // Controller ticks fall on exact fractions of the period; snap away the
  // representation error of t * f_pwm.
  phase = std::round(phase * 1e9) / 1e9;
  if (phase >= 1.0) phase = 0.0;
  return phase < duty ? 1 : 0;
}

void control_cycle(std::span<const double> q_d, RobotState& state, const ControlSettings& settings,
                   const RobotConfig& config) {
  const std::size_t n = config.n();
  if (q_d.size() != n || state.q.size() != n || state.integ.size() != n ||
      state.p_d.size() != 2 * n || state.u.size() != 2 * n || state.switch_count.size() != 2 * n) {
    throw ConfigError("control_cycle: dimension mismatch for " + std::to_string(n) + " joints");
  }
  const Variant arch = config.variant();

  for (std::size_t i = 0; i < n; ++i) {
    const ActuatorSpec& a = config.actuators[i];
    const double error = q_d[i] - encoder_read(state.q[i]);
    const PiOutput pi = pi_step(error, PiState{state.integ[i], false}, settings.gains, config.dt);
    state.integ[i] = pi.state.integ;

    if (arch == Variant::SemiModular) {
      const double p_stiff = settings.p_stiff.value_or(a.bellows.p_max / 2.0);
      const PressurePair p = split_pressures(pi.command, p_stiff, a.bellows.p_max);
      state.p_d[2 * i] = p.p1;
      state.p_d[2 * i + 1] = p.p2;
    } else {
      const auto& valve = std::get<BinaryValveSpec>(a.valve);
      const DutyPair d = split_duties(settings.d_stiff / 2.0 + pi.command, settings.d_stiff);
      const int u1 = pwm_sample(d.d1, state.t, valve.f_pwm);
      const int u2 = pwm_sample(d.d2, state.t, valve.f_pwm);
      for (const auto& [k, u] : {std::pair{2 * i, u1}, std::pair{2 * i + 1, u2}}) {
        if (state.u[k] != u) ++state.switch_count[k];
        state.u[k] = u;
      }
    }
  }
}

}  // namespace sponge
