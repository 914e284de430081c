#include <gtest/gtest.h>

#include <random>

#include "sponge/config_io.hpp"
#include "sponge/errors.hpp"
#include "sponge/model.hpp"

namespace sponge {
namespace {

TEST(Preset, SemiModularPrinted) {
  const ActuatorSpec a = preset(Variant::SemiModular, BellowsKind::Printed);
  EXPECT_EQ(a.bellows.p_max, 0.35);
  EXPECT_EQ(a.mass, 0.150);
  EXPECT_EQ(a.diameter, 0.082);
  EXPECT_EQ(a.height, 0.052);
  EXPECT_TRUE(std::holds_alternative<ProportionalValveSpec>(a.valve));
}

TEST(Preset, ModularCast) {
  const ActuatorSpec a = preset(Variant::Modular, BellowsKind::Cast);
  EXPECT_EQ(a.bellows.p_max, 0.3);
  EXPECT_EQ(a.bellows.fatigue_cycles, 31500u);
  EXPECT_TRUE(a.bellows.fatigue_censored);
  EXPECT_EQ(a.mass, 0.163);
  EXPECT_EQ(a.diameter, 0.066);
  EXPECT_EQ(a.height, 0.094);
  EXPECT_TRUE(std::holds_alternative<BinaryValveSpec>(a.valve));
}

TEST(Preset, SemiModularCastTakesHigherPressure) {
  EXPECT_EQ(preset(Variant::SemiModular, BellowsKind::Cast).bellows.p_max, 0.5);
}

// The four stock bellows all satisfy the steady-state identity; compared with
// the same expression evaluated independently.
TEST(Preset, CalibrationIdentityExact) {
  for (Variant v : {Variant::SemiModular, Variant::Modular}) {
    for (BellowsKind k : {BellowsKind::Printed, BellowsKind::Cast}) {
      const ActuatorSpec a = preset(v, k);
      const BellowsSpec& b = a.bellows;
      const double rhs = (b.k0 + b.k1 * b.p_max / 2.0) * a.q_max;
      EXPECT_EQ(b.torque_gain, rhs / b.p_max) << to_string(v) << " " << to_string(k);
    }
  }
}

TEST(Validate, DefaultsAreClean) {
  EXPECT_TRUE(validate(default_config(Variant::Modular)).empty());
  EXPECT_TRUE(validate(default_config(Variant::SemiModular)).empty());
  EXPECT_TRUE(validate(default_config(Variant::SemiModular, BellowsKind::Cast, 5)).empty());
}

TEST(Validate, ZeroStep) {
  TwinConfig c = default_config(Variant::Modular);
  c.robot.dt = 0.0;
  const auto v = validate(c);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().field, "sim.dt");
}

TEST(Validate, NoJoints) {
  TwinConfig c = default_config(Variant::Modular);
  c.robot.actuators.clear();
  const auto v = validate(c.robot);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().field, "robot.n");
}

TEST(Validate, MixedArchitecturesRejected) {
  TwinConfig c = default_config(Variant::Modular);
  c.robot.actuators[1] = preset(Variant::SemiModular, BellowsKind::Printed);
  EXPECT_FALSE(validate(c).empty());
}

TEST(State, DeltaPOrdering) {
  RobotState s = RobotState::zero(3);
  s.p = {0.30, 0.10, 0.05, 0.25, 0.2, 0.2};
  EXPECT_EQ(s.delta_p(0), 0.30 - 0.10);
  EXPECT_EQ(s.delta_p(1), 0.05 - 0.25);
  EXPECT_EQ(s.delta_p(2), 0.0);
}

TEST(ConfigIo, ParseNumber) {
  EXPECT_EQ(parse_number("0.25", "x"), 0.25);
  EXPECT_EQ(parse_number("  -1e-3 ", "x"), -1e-3);
  EXPECT_THROW(parse_number("abc", "x"), ConfigError);
  EXPECT_THROW(parse_number("1.0x", "x"), ConfigError);
  EXPECT_THROW(parse_number("inf", "x"), ConfigError);
}

TEST(ConfigIo, KeyValues) {
  const auto kv = parse_key_values("# header\na = 1\n\n b=two  # trailing\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "two");
  EXPECT_THROW(parse_key_values("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse_key_values("no equals sign\n"), ConfigError);
}

TEST(ConfigIo, EmptyTextGivesModularDefault) {
  EXPECT_EQ(parse_config(""), default_config(Variant::Modular));
}

TEST(ConfigIo, PerJointOverride) {
  const TwinConfig c = parse_config(
      "robot.variant = semi-modular\nrobot.n = 4\nbellows.2.kind = cast\nbellows.2.p_max = 0.5\n");
  ASSERT_EQ(c.robot.n(), 4u);
  EXPECT_EQ(c.robot.actuators[0].bellows.kind, BellowsKind::Printed);
  EXPECT_EQ(c.robot.actuators[1].bellows.kind, BellowsKind::Cast);
  EXPECT_EQ(c.robot.actuators[1].bellows.p_max, 0.5);
  // torque gain follows the overridden p_max
  const BellowsSpec& b = c.robot.actuators[1].bellows;
  EXPECT_EQ(b.torque_gain, calibrated_torque_gain(0.5, b.k0, b.k1, c.robot.actuators[1].q_max));
}

TEST(ConfigIo, UnknownKeyAndBadValues) {
  EXPECT_THROW(parse_config("robot.colour = red\n"), ConfigError);
  EXPECT_THROW(parse_config("robot.variant = hybrid\n"), ConfigError);
  EXPECT_THROW(parse_config("sim.dt = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("robot.n = 3\nbellows.7.p_max = 0.3\n"), ConfigError);
}

TEST(ConfigIo, RoundTripPresets) {
  for (Variant v : {Variant::SemiModular, Variant::Modular}) {
    for (BellowsKind k : {BellowsKind::Printed, BellowsKind::Cast}) {
      const TwinConfig c = default_config(v, k, 4);
      const std::string text = serialize_config(c);
      EXPECT_EQ(parse_config(text), c) << text;
      EXPECT_EQ(serialize_config(parse_config(text)), text);
    }
  }
}

TEST(ConfigIo, RoundTripRandomized) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  std::uniform_int_distribution<int> joints(1, 8);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const Variant v = coin(rng) ? Variant::Modular : Variant::SemiModular;
    const BellowsKind k = coin(rng) ? BellowsKind::Printed : BellowsKind::Cast;
    TwinConfig c = default_config(v, k, static_cast<std::size_t>(joints(rng)));
    for (ActuatorSpec& a : c.robot.actuators) {
      a.mass *= unit(rng);
      a.height *= unit(rng);
      a.bellows.k1 *= unit(rng);
      if (coin(rng)) a.joint_axis = JointAxis::AlternatingOrthogonal;
    }
    c.robot.supply.g_leak = coin(rng) ? 0.0 : 1e-4 * unit(rng);
    c.robot.base_orientation = coin(rng) ? BaseOrientation::Horizontal : BaseOrientation::VerticalUp;
    c.control.gains.kp *= unit(rng);
    if (coin(rng)) c.control.p_stiff = 0.1;

    ASSERT_TRUE(validate(c).empty());
    EXPECT_EQ(parse_config(serialize_config(c)), c) << serialize_config(c);
  }
}

}  // namespace
}  // namespace sponge
