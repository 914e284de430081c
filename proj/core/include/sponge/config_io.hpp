#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "sponge/model.hpp"

namespace sponge {

/// Formats with 9 significant digits (`%.9g`), the precision used by every
/// text artifact of the project.
std::string format_number(double value);

/// Parses a finite floating point number; throws ConfigError naming `what`.
double parse_number(std::string_view text, std::string_view what);

/// Splits flat `key = value` text. `#` starts a comment; blank lines are
/// skipped. Duplicate keys and lines without `=` are errors.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Config file schema
/// ------------------
/// robot.variant, robot.n, robot.base_orientation, sim.dt
/// actuator.{diameter,height,mass,q_max,joint_axis}
/// bellows.{kind,p_max,torque_gain,k0,k1,damping,volume,
///          fatigue_cycles,failure_offset_s,fatigue_censored}
/// valve.type = proportional: valve.{tau,resolution,dead_time_per_stage}
/// valve.type = binary:       valve.{conductance,f_pwm,switching_life,degradation_cycles}
/// supply.{p_source_d,q_src_max,g_leak,line_volume,tau_src}
/// control.{kp,ki,out_min,out_max,integ_min,integ_max,p_stiff,d_stiff}
///
/// Unprefixed actuator/bellows/valve keys apply to every joint; per-joint
/// overrides use a 1-based index, e.g. `bellows.2.kind = cast`.
/// Missing keys fall back to default_config(robot.variant, bellows.kind,
/// robot.n). When `bellows.torque_gain` or `valve.conductance` is absent it is
/// derived from the remaining parameters exactly as the presets do.
TwinConfig parse_config(std::string_view text);

/// Canonical form: keys sorted, numbers in the shortest form that parses back
/// to the same value, per-joint overrides only where a joint differs from joint 1.
std::string serialize_config(const TwinConfig& config);

TwinConfig load_config(const std::filesystem::path& path);
void save_config(const TwinConfig& config, const std::filesystem::path& path);

}  // namespace sponge
