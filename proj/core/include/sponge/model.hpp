#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sponge {

enum class Variant { SemiModular, Modular };
enum class BellowsKind { Printed, Cast };
enum class JointAxis { Aligned, AlternatingOrthogonal };
enum class BaseOrientation { VerticalUp, Horizontal };

std::string to_string(Variant v);
std::string to_string(BellowsKind k);
std::string to_string(JointAxis a);
std::string to_string(BaseOrientation o);

// Parsers accept the spellings produced by to_string and throw ConfigError otherwise.
Variant parse_variant(const std::string& s);
BellowsKind parse_bellows_kind(const std::string& s);
JointAxis parse_joint_axis(const std::string& s);
BaseOrientation parse_base_orientation(const std::string& s);

/// Lumped antagonistic bellows pair of one joint.
///
/// The torque gain, spring and damping coefficients are calibrated model
/// values, not measurements. Presets keep the steady-state identity
/// `torque_gain * p_max == (k0 + k1 * p_max / 2) * q_max` so that a full
/// pressure difference drives the joint exactly to its angle limit.
struct BellowsSpec {
  BellowsKind kind = BellowsKind::Printed;
  double p_max = 0.35;        // bar
  double torque_gain = 0.0;   // N·m/bar
  double k0 = 0.4;            // N·m/rad
  double k1 = 0.5;            // N·m/(rad·bar)
  double damping = 0.05;      // N·m·s/rad
  double volume = 6.0e-5;     // m³
  // Lifetime under the 10 s pressurize / 10 s vent protocol: completed
  // cycles plus the time into the cycle at which the bellows failed.
  std::uint64_t fatigue_cycles = 1;
  double failure_offset_s = 0.0;
  // True when the bellows was still intact at the end of the test.
  bool fatigue_censored = false;

  bool operator==(const BellowsSpec&) const = default;
};

/// External piezo valve with integrated pressure control.
struct ProportionalValveSpec {
  double tau = 0.05;                   // s
  double resolution = 0.005;           // bar
  double dead_time_per_stage = 0.01;   // s

  bool operator==(const ProportionalValveSpec&) const = default;
};

/// 3/2-way solenoid microvalve mounted under the bellows.
struct BinaryValveSpec {
  double conductance = 0.0;            // m³/(s·bar)
  double f_pwm = 100.0;                // Hz
  double switching_life = 5.0e8;       // cycles
  double degradation_cycles = 1.0e8;   // cycles

  bool operator==(const BinaryValveSpec&) const = default;
};

using ValveSpec = std::variant<ProportionalValveSpec, BinaryValveSpec>;

struct ActuatorSpec {
  Variant variant = Variant::SemiModular;
  double diameter = 0.082;  // m
  double height = 0.052;    // m
  double mass = 0.150;      // kg
  double q_max = 0.3229;    // rad, half of the joint range
  BellowsSpec bellows;
  ValveSpec valve;
  JointAxis joint_axis = JointAxis::Aligned;

  bool operator==(const ActuatorSpec&) const = default;
};

struct SupplySpec {
  double p_source_d = 1.0;    // bar, regulator setpoint
  double q_src_max = 1.0e-2;  // m³/s
  double g_leak = 0.0;        // m³/(s·bar); zero is the airtight design
  double line_volume = 1.0e-3;  // m³, line plus regulator reservoir
  double tau_src = 0.01;      // s

  bool operator==(const SupplySpec&) const = default;
};

struct RobotConfig {
  std::vector<ActuatorSpec> actuators;
  SupplySpec supply;
  BaseOrientation base_orientation = BaseOrientation::VerticalUp;
  double dt = 0.001;  // s

  std::size_t n() const { return actuators.size(); }
  Variant variant() const;

  bool operator==(const RobotConfig&) const = default;
};

/// PI configuration for one joint. Units depend on the architecture:
/// bar/rad for the pressure-commanded variant, duty/rad for PWM.
struct PiGains {
  double kp = 0.0;
  double ki = 0.0;
  double out_min = -1.0;
  double out_max = 1.0;
  double integ_min = -1.0;
  double integ_max = 1.0;

  bool operator==(const PiGains&) const = default;
};

struct ControlSettings {
  PiGains gains;
  // Mean bellows pressure; unset means p_max / 2 of each joint.
  std::optional<double> p_stiff;
  double d_stiff = 1.0;

  bool operator==(const ControlSettings&) const = default;
};

/// Everything a config file describes.
struct TwinConfig {
  RobotConfig robot;
  ControlSettings control;

  bool operator==(const TwinConfig&) const = default;
};

/// Full simulation state of an n-joint robot.
///
/// Pressure-indexed vectors have length 2n ordered [p_11, p_12, ..., p_n1, p_n2].
struct RobotState {
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> qdot;
  std::vector<double> p;
  double p_s = 0.0;
  std::vector<int> u;
  std::vector<double> p_d;
  std::vector<double> integ;
  std::vector<std::uint64_t> switch_count;

  static RobotState zero(std::size_t n);
  std::size_t n() const { return q.size(); }
  /// Pressure difference of joint i (0-based): p[2i] - p[2i+1].
  double delta_p(std::size_t i) const { return p[2 * i] - p[2 * i + 1]; }

  bool operator==(const RobotState&) const = default;
};

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

/// Default joint half-range (18.5 deg).
inline constexpr double kDefaultQMax = 0.3229;
/// Time in which a PWM bellows fills to 95 % of the supply pressure.
inline constexpr double kBinaryFillTime95 = 0.15;

/// Torque gain that satisfies the steady-state calibration identity.
double calibrated_torque_gain(double p_max, double k0, double k1, double q_max);

/// One of the four stock actuator/bellows combinations.
ActuatorSpec preset(Variant variant, BellowsKind kind);

/// Per-variant default controller settings.
ControlSettings default_control(Variant variant);

/// Supply used by the default configuration of each variant. The modular
/// robot runs its line at the bellows' p_max so PWM duty maps onto [0, p_max].
SupplySpec default_supply(Variant variant, double p_max);

/// Supply with the leakage of the early split-frame design: the regulator's
/// flow limit balances the leak at `plateau` bar.
SupplySpec early_design_supply(double plateau = 0.3);

TwinConfig default_config(Variant variant, BellowsKind kind = BellowsKind::Printed,
                          std::size_t n = 3);

/// Empty iff every invariant of the configuration holds.
std::vector<Violation> validate(const RobotConfig& config);
std::vector<Violation> validate(const TwinConfig& config);

}  // namespace sponge
