#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sponge/dynamics.hpp"
#include "sponge/errors.hpp"
#include "sponge/units.hpp"

namespace sponge {
namespace {

ChainModel chain(Variant v, std::size_t n, BaseOrientation base) {
  TwinConfig c = default_config(v, BellowsKind::Printed, n);
  c.robot.base_orientation = base;
  return ChainModel::from_config(c.robot);
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Joint positions and mass positions by direct forward kinematics.
void forward(std::span<const double> q, const ChainModel& m, std::vector<Point>& joints,
             std::vector<Point>& masses) {
  double phi = m.base == BaseOrientation::VerticalUp ? std::numbers::pi / 2.0 : 0.0;
  Point at;
  joints.clear();
  masses.clear();
  for (std::size_t i = 0; i < m.n(); ++i) {
    phi += q[i];
    joints.push_back(at);
    masses.push_back({at.x + m.com_offset[i] * std::cos(phi), at.y + m.com_offset[i] * std::sin(phi)});
    at = {at.x + m.length[i] * std::cos(phi), at.y + m.length[i] * std::sin(phi)};
  }
}

// Moment about each joint of every point mass beyond it.
std::vector<double> brute_force_load(std::span<const double> q, const ChainModel& m) {
  std::vector<Point> joints, masses;
  forward(q, m, joints, masses);
  std::vector<double> tau(m.n(), 0.0);
  for (std::size_t j = 0; j < m.n(); ++j) {
    for (std::size_t k = j; k < m.n(); ++k) tau[j] += m.mass[k] * m.gravity * (masses[k].x - joints[j].x);
  }
  return tau;
}

TEST(BellowsTorque, AntagonisticSymmetry) {
  const BellowsSpec b = preset(Variant::Modular, BellowsKind::Printed).bellows;
  for (double p = 0.0; p <= b.p_max; p += 0.01) EXPECT_EQ(bellows_torque(p, p, 0.0, 0.0, b), 0.0);
}

TEST(BellowsTorque, FullDifferenceBalancesAtLimit) {
  for (Variant v : {Variant::SemiModular, Variant::Modular}) {
    const ActuatorSpec a = preset(v, BellowsKind::Printed);
    EXPECT_NEAR(bellows_torque(a.bellows.p_max, 0.0, a.q_max, 0.0, a.bellows), 0.0, 1e-15);
  }
}

TEST(BellowsTorque, DependsOnlyOnDifferenceAtZero) {
  const BellowsSpec b = preset(Variant::SemiModular, BellowsKind::Printed).bellows;
  for (double x : {0.0, 0.05, 0.1, 0.2}) {
    EXPECT_NEAR(bellows_torque(0.1 + x, x, 0.0, 0.0, b), b.torque_gain * 0.1, 1e-15);
  }
}

// Steady state without gravity: q* = g dp / (k0 + k1 p_bar).
TEST(BellowsTorque, SteadyStateMonotoneInDifference) {
  const BellowsSpec b = preset(Variant::SemiModular, BellowsKind::Printed).bellows;
  const double mean = b.p_max / 2.0;
  double prev = -INFINITY;
  for (int k = -35; k <= 35; ++k) {
    const double dp = 0.01 * k;
    const double q = b.torque_gain * dp / (b.k0 + b.k1 * mean);
    EXPECT_NEAR(bellows_torque(mean + dp / 2, mean - dp / 2, q, 0.0, b), 0.0, 1e-15);
    EXPECT_GT(q, prev);
    prev = q;
  }
}

TEST(BellowsTorque, StiffnessGrowsWithMeanPressure) {
  const BellowsSpec b = preset(Variant::Modular, BellowsKind::Printed).bellows;
  const double h = 1e-4;
  double prev = 0.0;
  for (double mean = 0.0; mean <= b.p_max; mean += 0.05) {
    const double k = -(bellows_torque(mean, mean, h, 0.0, b) - bellows_torque(mean, mean, -h, 0.0, b)) /
                     (2 * h);
    EXPECT_GT(k, prev);
    prev = k;
  }
}

TEST(Gravity, UprightIsEquilibrium) {
  const ChainModel m = chain(Variant::Modular, 5, BaseOrientation::VerticalUp);
  for (double t : gravity_torques(std::vector<double>(5, 0.0), m)) EXPECT_NEAR(t, 0.0, 1e-15);
}

TEST(Gravity, HorizontalCantilever) {
  const ChainModel m = chain(Variant::Modular, 3, BaseOrientation::Horizontal);
  const auto tau = gravity_torques(std::vector<double>(3, 0.0), m);
  const double oracle = 0.163 * 9.81 * 0.094 * (0.5 + 1.5 + 2.5);
  EXPECT_NEAR(tau[0], oracle, 1e-12 * oracle);
  EXPECT_NEAR(tau[0], 0.676, 0.001);
  EXPECT_NEAR(tau[1], 0.301, 0.001);
}

TEST(Gravity, MatchesBruteForceAtRandomPoses) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-0.32, 0.32);
  for (BaseOrientation base : {BaseOrientation::VerticalUp, BaseOrientation::Horizontal}) {
    const ChainModel m = chain(Variant::SemiModular, 6, base);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> q(6);
      for (double& x : q) x = angle(rng);
      const auto tau = gravity_torques(q, m);
      const auto ref = brute_force_load(q, m);
      for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(tau[j], ref[j], 1e-13);
    }
  }
}

TEST(Gravity, GradientOfPotential) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-0.32, 0.32);
  const double h = 1e-6;
  for (BaseOrientation base : {BaseOrientation::VerticalUp, BaseOrientation::Horizontal}) {
    const ChainModel m = chain(Variant::Modular, 4, base);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> q(4);
      for (double& x : q) x = angle(rng);
      const auto tau = gravity_torques(q, m);
      for (std::size_t j = 0; j < 4; ++j) {
        auto up = q, down = q;
        up[j] += h;
        down[j] -= h;
        const double fd = (potential_energy(up, m) - potential_energy(down, m)) / (2 * h);
        EXPECT_NEAR(tau[j], fd, 1e-6 * std::max(std::abs(fd), 1e-3));
      }
    }
  }
}

TEST(MassMatrix, MatchesPointVelocities) {
  const ChainModel m = chain(Variant::SemiModular, 3, BaseOrientation::VerticalUp);
  const std::vector<double> q = {0.1, -0.2, 0.3};
  const std::vector<double> qdot = {0.5, 1.0, -0.7};
  const double h = 1e-7;
  std::vector<Point> j0, a, j1, b;
  std::vector<double> qa = q, qb = q;
  for (std::size_t i = 0; i < 3; ++i) {
    qa[i] -= h * qdot[i];
    qb[i] += h * qdot[i];
  }
  forward(qa, m, j0, a);
  forward(qb, m, j1, b);
  double t = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double vx = (b[k].x - a[k].x) / (2 * h);
    const double vy = (b[k].y - a[k].y) / (2 * h);
    t += 0.5 * m.mass[k] * (vx * vx + vy * vy);
  }
  EXPECT_NEAR(kinetic_energy(q, qdot, m), t, 1e-8 * t);
  const auto M = mass_matrix(q, m);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(M[r * 3 + c], M[c * 3 + r]);
}

TEST(Step, EquilibriumUnchanged) {
  const ChainModel m = chain(Variant::Modular, 3, BaseOrientation::VerticalUp);
  RobotState s = RobotState::zero(3);
  const RobotState before = s;
  const std::vector<double> zero(3, 0.0);
  for (int k = 0; k < 100; ++k) step_dynamics(s, zero, m, 0.001);
  EXPECT_EQ(s, before);
}

// Constant torque on a single undamped link: q = tau t^2 / (2 I). Semi-implicit
// Euler gives exactly (1 + dt/t) times that, i.e. 1 % high after 100 steps.
TEST(Step, ConstantTorqueQuadratic) {
  ChainModel m = chain(Variant::Modular, 1, BaseOrientation::VerticalUp);
  m.gravity = 0.0;
  m.damping = {0.0};
  m.q_max = {10.0};
  const double inertia = m.mass[0] * m.com_offset[0] * m.com_offset[0];
  const double tau = 1e-3;
  RobotState s = RobotState::zero(1);
  const std::vector<double> act = {tau};
  for (int k = 0; k < 100; ++k) step_dynamics(s, act, m, 0.001);
  const double analytic = tau * 0.1 * 0.1 / (2 * inertia);
  EXPECT_LE(std::abs(s.q[0] - analytic) / analytic, 0.01 + 1e-9);
}

TEST(Step, HardStop) {
  ChainModel m = chain(Variant::Modular, 1, BaseOrientation::VerticalUp);
  RobotState s = RobotState::zero(1);
  const std::vector<double> act = {1.0};
  for (int k = 0; k < 200; ++k) step_dynamics(s, act, m, 0.001);
  EXPECT_EQ(s.q[0], m.q_max[0]);
  EXPECT_EQ(s.qdot[0], 0.0);
}

TEST(Step, NonFiniteFaults) {
  ChainModel m = chain(Variant::Modular, 1, BaseOrientation::VerticalUp);
  RobotState s = RobotState::zero(1);
  const std::vector<double> act = {NAN};
  EXPECT_THROW(step_dynamics(s, act, m, 0.001), SimulationFault);
}

// Kinetic + gravitational + bellows spring energy with both bellows vented.
TEST(Step, EnergyNonIncreasingWithoutPressure) {
  for (BaseOrientation base : {BaseOrientation::VerticalUp, BaseOrientation::Horizontal}) {
    TwinConfig c = default_config(Variant::SemiModular, BellowsKind::Printed, 3);
    c.robot.base_orientation = base;
    const ChainModel m = ChainModel::from_config(c.robot);
    RobotState s = RobotState::zero(3);
    s.q = {0.2, -0.25, 0.15};
    auto energy = [&] {
      double e = kinetic_energy(s.q, s.qdot, m) + potential_energy(s.q, m);
      for (std::size_t i = 0; i < 3; ++i) e += 0.5 * c.robot.actuators[i].bellows.k0 * s.q[i] * s.q[i];
      return e;
    };
    std::vector<double> act(3);
    double prev = energy();
    for (int k = 0; k < 3000; ++k) {
      for (std::size_t i = 0; i < 3; ++i)
        act[i] = bellows_torque(0.0, 0.0, s.q[i], 0.0, c.robot.actuators[i].bellows);
      step_dynamics(s, act, m, 0.001);
      const double e = energy();
      ASSERT_LE(e, prev + 1e-15) << "step " << k;
      prev = e;
    }
  }
}

TEST(Encoder, Examples) {
  EXPECT_EQ(encoder_read(0.0), 0.0);
  EXPECT_DOUBLE_EQ(units::rad_to_deg(encoder_read(units::deg_to_rad(0.05))), 0.09);
  EXPECT_NEAR(units::rad_to_deg(encoder_read(units::deg_to_rad(10.0))), 9.99, 1e-12);
  EXPECT_NEAR(units::rad_to_deg(encoder_read(units::deg_to_rad(-10.0))), -9.99, 1e-12);
}

}  // namespace
}  // namespace sponge
