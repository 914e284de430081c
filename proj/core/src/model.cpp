#include "sponge/model.hpp"

#include <cmath>

#include "sponge/errors.hpp"
#include "sponge/units.hpp"

namespace sponge {

std::string to_string(Variant v) {
  return v == Variant::SemiModular ? "semi-modular" : "modular";
}

std::string to_string(BellowsKind k) { return k == BellowsKind::Printed ? "printed" : "cast"; }

std::string to_string(JointAxis a) {
  return a == JointAxis::Aligned ? "aligned" : "alternating-orthogonal";
}

std::string to_string(BaseOrientation o) {
  return o == BaseOrientation::VerticalUp ? "vertical-up" : "horizontal";
}

Variant parse_variant(const std::string& s) {
  if (s == "semi-modular") return Variant::SemiModular;
  if (s == "modular") return Variant::Modular;
  throw ConfigError("unknown variant '" + s + "' (expected semi-modular|modular)");
}

BellowsKind parse_bellows_kind(const std::string& s) {
  if (s == "printed") return BellowsKind::Printed;
  if (s == "cast") return BellowsKind::Cast;
  throw ConfigError("unknown bellows kind '" + s + "' (expected printed|cast)");
}

JointAxis parse_joint_axis(const std::string& s) {
  if (s == "aligned") return JointAxis::Aligned;
  if (s == "alternating-orthogonal") return JointAxis::AlternatingOrthogonal;
  throw ConfigError("unknown joint axis '" + s + "'");
}

BaseOrientation parse_base_orientation(const std::string& s) {
  if (s == "vertical-up") return BaseOrientation::VerticalUp;
  if (s == "horizontal") return BaseOrientation::Horizontal;
  throw ConfigError("unknown base orientation '" + s + "'");
}

Variant RobotConfig::variant() const {
  if (actuators.empty()) throw ConfigError("robot has no actuators");
  return actuators.front().variant;
}

RobotState RobotState::zero(std::size_t n) {
  RobotState s;
  s.q.assign(n, 0.0);
  s.qdot.assign(n, 0.0);
  s.p.assign(2 * n, 0.0);
  s.u.assign(2 * n, 0);
  s.p_d.assign(2 * n, 0.0);
  s.integ.assign(n, 0.0);
  s.switch_count.assign(2 * n, 0);
  return s;
}

double calibrated_torque_gain(double p_max, double k0, double k1, double q_max) {
  return (k0 + k1 * p_max / 2.0) * q_max / p_max;
}

ActuatorSpec preset(Variant variant, BellowsKind kind) {
  ActuatorSpec a;
  a.variant = variant;
  a.q_max = kDefaultQMax;
  a.bellows.kind = kind;
  a.bellows.k0 = 0.4;
  a.bellows.k1 = 0.5;
  a.bellows.damping = 0.05;

  if (variant == Variant::SemiModular) {
    a.diameter = 0.082;
    a.height = 0.052;
    a.mass = 0.150;
    a.bellows.volume = 6.0e-5;
    if (kind == BellowsKind::Printed) {
      // 7 min 54 s = 23 full cycles + 14 s
      a.bellows.p_max = 0.35;
      a.bellows.fatigue_cycles = 23;
      a.bellows.failure_offset_s = 14.0;
    } else {
      a.bellows.p_max = 0.5;
      a.bellows.fatigue_cycles = 13068;
    }
    a.valve = ProportionalValveSpec{};
  } else {
    a.diameter = 0.066;
    a.height = 0.094;
    a.mass = 0.163;
    a.bellows.volume = 4.0e-5;
    a.bellows.p_max = 0.3;
    if (kind == BellowsKind::Printed) {
      // 15 min 2 s = 45 full cycles + 2 s
      a.bellows.fatigue_cycles = 45;
      a.bellows.failure_offset_s = 2.0;
    } else {
      a.bellows.fatigue_cycles = 31500;
      a.bellows.fatigue_censored = true;
    }
    // Exponential fill p(t) = p_s (1 - exp(-t G p_ref / V)) reaching 95 % in
    // kBinaryFillTime95 gives V / (G p_ref) = kBinaryFillTime95 / -ln(0.05).
    BinaryValveSpec v;
    const double tau_fill = kBinaryFillTime95 / -std::log(0.05);
    v.conductance = a.bellows.volume / (tau_fill * units::kRefPressureBar);
    a.valve = v;
  }
  a.bellows.torque_gain =
      calibrated_torque_gain(a.bellows.p_max, a.bellows.k0, a.bellows.k1, a.q_max);
  return a;
}

ControlSettings default_control(Variant variant) {
  ControlSettings c;
  if (variant == Variant::SemiModular) {
    c.gains = PiGains{0.9, 1.8, -0.35, 0.35, -0.35, 0.35};
  } else {
    c.gains = PiGains{4.0, 5.2, -0.5, 0.5, -0.5, 0.5};
  }
  c.d_stiff = 1.0;
  return c;
}

SupplySpec default_supply(Variant variant, double p_max) {
  SupplySpec s;
  s.p_source_d = variant == Variant::Modular ? p_max : 1.0;
  return s;
}

SupplySpec early_design_supply(double plateau) {
  SupplySpec s;
  s.p_source_d = 1.5;
  s.g_leak = 1.0e-3;
  s.q_src_max = plateau * s.g_leak;
  return s;
}

TwinConfig default_config(Variant variant, BellowsKind kind, std::size_t n) {
  TwinConfig c;
  const ActuatorSpec a = preset(variant, kind);
  c.robot.actuators.assign(n, a);
  c.robot.supply = default_supply(variant, a.bellows.p_max);
  c.robot.base_orientation = BaseOrientation::VerticalUp;
  c.robot.dt = 0.001;
  c.control = default_control(variant);
  if (variant == Variant::SemiModular) {
    c.control.gains.out_min = -a.bellows.p_max;
    c.control.gains.out_max = a.bellows.p_max;
    c.control.gains.integ_min = -a.bellows.p_max;
    c.control.gains.integ_max = a.bellows.p_max;
  }
  return c;
}

namespace {

struct Checker {
  std::vector<Violation>& out;

  void require(bool ok, std::string field, std::string rule) {
    if (!ok) out.push_back({std::move(field), std::move(rule)});
  }
  void positive(double v, const std::string& field) {
    require(std::isfinite(v) && v > 0.0, field, "must be finite and > 0");
  }
  void non_negative(double v, const std::string& field) {
    require(std::isfinite(v) && v >= 0.0, field, "must be finite and >= 0");
  }
};

}  // namespace

std::vector<Violation> validate(const RobotConfig& config) {
  std::vector<Violation> out;
  Checker c{out};

  c.require(config.n() >= 1, "robot.n", "must be >= 1");
  c.positive(config.dt, "sim.dt");

  const SupplySpec& s = config.supply;
  c.non_negative(s.p_source_d, "supply.p_source_d");
  c.non_negative(s.q_src_max, "supply.q_src_max");
  c.non_negative(s.g_leak, "supply.g_leak");
  c.positive(s.line_volume, "supply.line_volume");
  c.positive(s.tau_src, "supply.tau_src");
  if (std::isfinite(config.dt) && config.dt > 0.0 && s.tau_src > 0.0) {
    c.require(config.dt < s.tau_src, "supply.tau_src", "must exceed sim.dt");
  }

  for (std::size_t i = 0; i < config.n(); ++i) {
    const ActuatorSpec& a = config.actuators[i];
    const std::string pre = "actuator[" + std::to_string(i + 1) + "].";
    c.positive(a.diameter, pre + "diameter");
    c.positive(a.height, pre + "height");
    c.positive(a.mass, pre + "mass");
    c.positive(a.q_max, pre + "q_max");
    c.require(a.variant == config.actuators.front().variant, pre + "variant",
              "all actuators must share one control architecture");

    const BellowsSpec& b = a.bellows;
    c.positive(b.p_max, pre + "bellows.p_max");
    c.positive(b.torque_gain, pre + "bellows.torque_gain");
    c.positive(b.k0, pre + "bellows.k0");
    c.non_negative(b.k1, pre + "bellows.k1");
    c.positive(b.damping, pre + "bellows.damping");
    c.positive(b.volume, pre + "bellows.volume");
    c.non_negative(b.failure_offset_s, pre + "bellows.failure_offset_s");
    c.require(b.fatigue_cycles > 0 || b.failure_offset_s > 0.0, pre + "bellows.fatigue_cycles",
              "fatigue life must be > 0");

    if (const auto* pv = std::get_if<ProportionalValveSpec>(&a.valve)) {
      c.require(a.variant == Variant::SemiModular, pre + "valve",
                "proportional valves belong to the semi-modular variant");
      c.positive(pv->tau, pre + "valve.tau");
      c.non_negative(pv->resolution, pre + "valve.resolution");
      c.non_negative(pv->dead_time_per_stage, pre + "valve.dead_time_per_stage");
      if (pv->tau > 0.0 && config.dt > 0.0) {
        c.require(config.dt < pv->tau, pre + "valve.tau", "must exceed sim.dt");
      }
    } else {
      const auto& bv = std::get<BinaryValveSpec>(a.valve);
      c.require(a.variant == Variant::Modular, pre + "valve",
                "binary microvalves belong to the modular variant");
      c.positive(bv.conductance, pre + "valve.conductance");
      c.positive(bv.f_pwm, pre + "valve.f_pwm");
      c.positive(bv.switching_life, pre + "valve.switching_life");
      c.positive(bv.degradation_cycles, pre + "valve.degradation_cycles");
    }
  }
  return out;
}

std::vector<Violation> validate(const TwinConfig& config) {
  std::vector<Violation> out = validate(config.robot);
  Checker c{out};
  const PiGains& g = config.control.gains;
  c.non_negative(g.kp, "control.kp");
  c.non_negative(g.ki, "control.ki");
  c.require(g.out_min < g.out_max, "control.out_min", "must be < control.out_max");
  c.require(g.integ_min <= g.integ_max, "control.integ_min", "must be <= control.integ_max");
  const double d = config.control.d_stiff;
  c.require(std::isfinite(d) && d >= 0.0 && d <= 2.0, "control.d_stiff", "must lie in [0, 2]");
  if (config.control.p_stiff) {
    const double p = *config.control.p_stiff;
    for (std::size_t i = 0; i < config.robot.n(); ++i) {
      if (!(p >= 0.0 && p <= config.robot.actuators[i].bellows.p_max)) {
        c.require(false, "control.p_stiff", "must lie in [0, p_max]");
        break;
      }
    }
  }
  return out;
}

}  // namespace sponge
