#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sponge/model.hpp"

namespace sponge {

/// Planar serial chain of point masses.
///
/// Joint 1 sits at the base. Link i has length `length[i]` (the actuator
/// height) and carries its mass at `com_offset[i]` along the link. Absolute
/// link angles are measured from the base direction: straight up for
/// VerticalUp, horizontal for Horizontal. Positive joint angles rotate
/// counter-clockwise. Alternating-orthogonal snake chains are analysed with
/// the same planar model, which is the worst-case projection of gravity.
struct ChainModel {
  std::vector<double> mass;
  std::vector<double> length;
  std::vector<double> com_offset;
  std::vector<double> damping;
  std::vector<double> q_max;
  double gravity = 9.81;
  BaseOrientation base = BaseOrientation::VerticalUp;

  static ChainModel from_config(const RobotConfig& config);
  std::size_t n() const { return mass.size(); }
};

/// Antagonistic bellows torque: pressure difference drives the joint, the
/// mean pressure stiffens it.
double bellows_torque(double p1, double p2, double q, double qdot, const BellowsSpec& spec);

/// Generalized gravity load dU/dq: the torque each joint must supply to hold
/// the pose. Gravity itself acts on the joints with the opposite sign.
std::vector<double> gravity_torques(std::span<const double> q, const ChainModel& model);

/// Gravitational potential energy relative to the base joint height.
double potential_energy(std::span<const double> q, const ChainModel& model);

/// Joint-space inertia matrix, row-major n x n.
std::vector<double> mass_matrix(std::span<const double> q, const ChainModel& model);

double kinetic_energy(std::span<const double> q, std::span<const double> qdot,
                      const ChainModel& model);

/// Semi-implicit Euler step of q and qdot (state.t is left untouched).
///
/// `actuation` holds the bellows torques without their viscous part; joint
/// damping from the model is applied implicitly in the velocity update,
///   (M + dt C) qdot' = M qdot + dt (actuation - gravity_torques(q)),
///   q' = q + dt qdot',
/// which keeps the light distal links stable at a 1 ms step. Joints that
/// would cross +-q_max land exactly on the stop with zero velocity; the other
/// joints are re-solved with the stopped ones held, so the stop's reaction is
/// shared through the coupled inertia. Throws SimulationFault on non-finite
/// results.
void step_dynamics(RobotState& state, std::span<const double> actuation,
                   const ChainModel& model, double dt);

/// Encoder resolution (0.09 deg) in radians.
double encoder_resolution();

/// Nearest multiple of the encoder resolution, halves away from zero.
double encoder_read(double q);

}  // namespace sponge
