#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sponge/errors.hpp"
#include "sponge/harness.hpp"

namespace sponge {
namespace {

RampSuite short_suite(double duration) {
  RampSuite r;
  r.duration_s = duration;
  return r;
}

TEST(Airtight, HoldsWithoutLeak) {
  const ExperimentResult r =
      run_airtightness(default_config(Variant::Modular), default_staircase());
  EXPECT_NEAR(r.summary.at("final_ps_bar"), 1.5, kAirtightHoldToleranceBar);
  EXPECT_LE(r.summary.at("final_hold_max_dev_bar"), kAirtightHoldToleranceBar);
}

TEST(Airtight, EarlyDesignPlateau) {
  TwinConfig c = default_config(Variant::Modular);
  c.robot.supply = early_design_supply();
  const ExperimentResult r = run_airtightness(c, default_staircase());
  EXPECT_NEAR(r.summary.at("final_ps_bar"), kLeakPlateauBar, kLeakPlateauToleranceBar);
  EXPECT_LE(r.summary.at("ps_max_bar"), kLeakPlateauBar + kLeakPlateauToleranceBar);
}

TEST(Airtight, EmptyStaircase) {
  const ExperimentResult r = run_airtightness(default_config(Variant::Modular), {});
  EXPECT_EQ(r.summary.at("final_ps_bar"), r.summary.at("initial_ps_bar"));
}

TEST(Airtight, StaircaseParsing) {
  const auto s = parse_staircase("0.5:10, 1.0:5");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].setpoint_bar, 1.0);
  EXPECT_EQ(s[1].hold_s, 5.0);
  EXPECT_THROW(parse_staircase("0.5"), ConfigError);
  EXPECT_THROW(parse_staircase("-1:3"), ConfigError);
  EXPECT_EQ(default_staircase().size(), 6u);
}

TEST(Ramp, Shape) {
  const RampSuite r;
  EXPECT_EQ(r.desired_deg(0.0, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.desired_deg(1.0, 0), 5.0);
  EXPECT_DOUBLE_EQ(r.desired_deg(5.0, 0), 15.0);
  EXPECT_DOUBLE_EQ(r.desired_deg(11.0, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.desired_deg(16.0, 0), -15.0);
  EXPECT_DOUBLE_EQ(r.desired_deg(20.0, 0), -10.0);
  EXPECT_EQ(r.desired_deg(2.0, 1), 0.0);
  EXPECT_DOUBLE_EQ(r.desired_deg(3.0, 1), 5.0);
}

TEST(Tracking, ZeroTrajectoryHolds) {
  for (Variant v : {Variant::SemiModular, Variant::Modular}) {
    RampSuite r = short_suite(10.0);
    r.amplitude_deg = 0.0;
    const ExperimentResult res = run_tracking(default_config(v), r);
    EXPECT_LE(res.summary.at("mean_rmse_deg"), 0.09) << to_string(v);
  }
}

TEST(Tracking, RejectsOutOfRange) {
  RampSuite r = short_suite(1.0);
  r.amplitude_deg = 20.0;
  EXPECT_THROW(run_tracking(default_config(Variant::Modular), r), ConfigError);
}

TEST(Tracking, BitIdenticalRepeat) {
  for (Variant v : {Variant::SemiModular, Variant::Modular}) {
    const TwinConfig c = default_config(v);
    const ExperimentResult a = run_tracking(c, short_suite(8.0));
    const ExperimentResult b = run_tracking(c, short_suite(8.0));
    EXPECT_EQ(a.series.to_csv(), b.series.to_csv());
    EXPECT_EQ(a.summary, b.summary);
  }
}

TEST(Tracking, CsvRmseMatchesSummary) {
  const ExperimentResult r = run_tracking(default_config(Variant::SemiModular), short_suite(20.0));
  const TimeSeries parsed = TimeSeries::from_csv(r.series.to_csv());
  const auto rmse = rmse_from_series(parsed, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double reported = r.summary.at("rmse_q" + std::to_string(i + 1) + "_deg");
    EXPECT_NEAR(rmse[i], reported, 1e-6 * std::max(reported, 1.0));
  }
}

TEST(Results, WrittenToDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "sponge_harness_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_result(run_fatigue(preset(Variant::Modular, BellowsKind::Cast).bellows), dir, "fatigue");
  std::ifstream in(dir / "fatigue_summary.txt");
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_NE(text.str().find("cycles = 31500"), std::string::npos) << text.str();
  EXPECT_TRUE(std::filesystem::exists(dir / "fatigue.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Fatigue, Presets) {
  const Lifetime sm_cast = fatigue_lifetime(preset(Variant::SemiModular, BellowsKind::Cast).bellows);
  EXPECT_EQ(sm_cast.hours, 72u);
  EXPECT_EQ(sm_cast.minutes, 36u);
  EXPECT_EQ(sm_cast.rem_seconds, 0.0);
  EXPECT_EQ(sm_cast.seconds, 261360.0);

  const Lifetime m_cast = fatigue_lifetime(preset(Variant::Modular, BellowsKind::Cast).bellows);
  EXPECT_EQ(m_cast.hours, 175u);
  EXPECT_EQ(m_cast.minutes, 0u);
  EXPECT_TRUE(m_cast.censored);
  EXPECT_EQ(m_cast.seconds, 630000.0);

  const Lifetime sm_printed =
      fatigue_lifetime(preset(Variant::SemiModular, BellowsKind::Printed).bellows);
  EXPECT_EQ(sm_printed.cycles, 23u);
  EXPECT_EQ(sm_printed.minutes, 7u);
  EXPECT_EQ(sm_printed.rem_seconds, 54.0);

  const Lifetime m_printed = fatigue_lifetime(preset(Variant::Modular, BellowsKind::Printed).bellows);
  EXPECT_EQ(m_printed.minutes, 15u);
  EXPECT_EQ(m_printed.rem_seconds, 2.0);
}

TEST(Fatigue, HoursAreCyclesTimesPeriod) {
  for (Variant v : {Variant::SemiModular, Variant::Modular}) {
    for (BellowsKind k : {BellowsKind::Printed, BellowsKind::Cast}) {
      const BellowsSpec b = preset(v, k).bellows;
      const Lifetime l = fatigue_lifetime(b);
      EXPECT_EQ(l.seconds, static_cast<double>(b.fatigue_cycles) * 20.0 + b.failure_offset_s);
      EXPECT_EQ(static_cast<double>(l.hours * 3600 + l.minutes * 60) + l.rem_seconds, l.seconds);
    }
  }
}

TEST(Fatigue, SimulatedTraceCountsCycles) {
  const ExperimentResult r =
      run_fatigue(preset(Variant::SemiModular, BellowsKind::Printed).bellows, 10.0, 10.0, 3);
  EXPECT_EQ(r.summary.at("detected_cycles"), 3.0);
}

TEST(ValveWear, Bounds) {
  EXPECT_NEAR(valve_wear_hours(1e8, 100.0), 277.8, 0.05);
  EXPECT_NEAR(valve_wear_hours(5e8, 100.0), 1388.9, 0.05);
  EXPECT_EQ(valve_wear_hours(0.0, 100.0), 0.0);
  EXPECT_THROW(valve_wear_hours(1.0, 0.0), ConfigError);
}

TEST(GravityMargin, ModularHorizontalStacksOne) {
  const GravityMarginReport r =
      gravity_margin(default_config(Variant::Modular).robot, BaseOrientation::Horizontal);
  EXPECT_EQ(r.max_stackable, 1u);
  ASSERT_EQ(r.joints.size(), 3u);
  EXPECT_NEAR(r.joints[1].load, 0.301, 0.001);
  EXPECT_LT(r.joints[1].margin, 0.0);
  EXPECT_GT(r.joints[2].margin, 0.0);
}

TEST(GravityMargin, UprightAlwaysPositive) {
  const GravityMarginReport r =
      gravity_margin(default_config(Variant::SemiModular).robot, BaseOrientation::VerticalUp, 20);
  EXPECT_TRUE(r.unbounded);
  EXPECT_EQ(r.max_stackable, 20u);
  for (const JointMargin& j : r.joints) EXPECT_GT(j.margin, 0.0);
}

TEST(GravityMargin, AvailableScalesWithPressure) {
  TwinConfig c = default_config(Variant::Modular);
  const auto base = gravity_margin(c.robot, BaseOrientation::Horizontal);
  for (ActuatorSpec& a : c.robot.actuators) a.bellows.p_max *= 2.0;
  const auto doubled = gravity_margin(c.robot, BaseOrientation::Horizontal);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(doubled.joints[i].available, 2.0 * base.joints[i].available);
}

TEST(Sweep, OrderedAndMatchesSingleRuns) {
  const TwinConfig c = default_config(Variant::Modular);
  const RampSuite r = short_suite(6.0);
  const auto pts = run_sweep(c, {3.0, 4.0}, {2.0, 5.2}, r, 3);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[1].kp, 3.0);
  EXPECT_EQ(pts[1].ki, 5.2);
  EXPECT_EQ(pts[2].kp, 4.0);
  TwinConfig single = c;
  single.control.gains.kp = 4.0;
  single.control.gains.ki = 5.2;
  EXPECT_EQ(pts[3].mean_rmse_deg, run_tracking(single, r).summary.at("mean_rmse_deg"));
}

}  // namespace
}  // namespace sponge
