#include "sponge/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "sponge/errors.hpp"
#include "sponge/units.hpp"

namespace sponge {

namespace {

void check_dims(std::span<const double> q, const ChainModel& model) {
  if (q.size() != model.n()) {
    throw ConfigError("joint vector has " + std::to_string(q.size()) + " entries, chain has " +
                      std::to_string(model.n()));
  }
}

// Unit direction of each link. Angles are summed relative to the base
// direction and rotated afterwards, so an upright chain at q = 0 points
// exactly along +y.
struct LinkDirs {
  std::vector<double> c;  // x component
  std::vector<double> s;  // y component
};

LinkDirs link_dirs(std::span<const double> q, const ChainModel& model) {
  LinkDirs d;
  d.c.resize(q.size());
  d.s.resize(q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    acc += q[i];
    if (model.base == BaseOrientation::VerticalUp) {
      d.c[i] = -std::sin(acc);
      d.s[i] = std::cos(acc);
    } else {
      d.c[i] = std::cos(acc);
      d.s[i] = std::sin(acc);
    }
  }
  return d;
}

// Jacobian of the point-mass positions: column j of link k's 2x? block is
// d(x_k, y_k)/dq_j, nonzero for j <= k.
Eigen::MatrixXd point_mass_jacobian(std::size_t k, const LinkDirs& dir, const ChainModel& model) {
  const auto n = static_cast<Eigen::Index>(dir.c.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, n);
  // Walk back from the mass to the base, accumulating the lever arm.
  double dx = model.com_offset[k] * dir.c[k];
  double dy = model.com_offset[k] * dir.s[k];
  for (std::size_t j = k + 1; j-- > 0;) {
    J(0, static_cast<Eigen::Index>(j)) = -dy;
    J(1, static_cast<Eigen::Index>(j)) = dx;
    if (j > 0) {
      dx += model.length[j - 1] * dir.c[j - 1];
      dy += model.length[j - 1] * dir.s[j - 1];
    }
  }
  return J;
}

Eigen::MatrixXd inertia(std::span<const double> q, const ChainModel& model) {
  const LinkDirs dir = link_dirs(q, model);
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Eigen::MatrixXd J = point_mass_jacobian(k, dir, model);
    M.noalias() += model.mass[k] * J.transpose() * J;
  }
  return M;
}

}  // namespace

ChainModel ChainModel::from_config(const RobotConfig& config) {
  ChainModel m;
  for (const ActuatorSpec& a : config.actuators) {
    m.mass.push_back(a.mass);
    m.length.push_back(a.height);
    m.com_offset.push_back(a.height / 2.0);
    m.damping.push_back(a.bellows.damping);
    m.q_max.push_back(a.q_max);
  }
  m.gravity = units::kStandardGravity;
  m.base = config.base_orientation;
  return m;
}

double bellows_torque(double p1, double p2, double q, double qdot, const BellowsSpec& spec) {
  const double stiffness = spec.k0 + spec.k1 * (p1 + p2) / 2.0;
  return spec.torque_gain * (p1 - p2) - stiffness * q - spec.damping * qdot;
}

std::vector<double> gravity_torques(std::span<const double> q, const ChainModel& model) {
  check_dims(q, model);
  const LinkDirs dir = link_dirs(q, model);
  const std::size_t n = q.size();
  std::vector<double> tau(n, 0.0);
  // Distal-to-proximal recursion on mass and horizontal lever arms.
  double distal_mass = 0.0;
  double distal_torque = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    const double c = dir.c[j];
    distal_torque += model.gravity *
                     (model.mass[j] * model.com_offset[j] * c + distal_mass * model.length[j] * c);
    distal_mass += model.mass[j];
    tau[j] = distal_torque;
  }
  return tau;
}

double potential_energy(std::span<const double> q, const ChainModel& model) {
  check_dims(q, model);
  const LinkDirs dir = link_dirs(q, model);
  double y_joint = 0.0;
  double u = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double s = dir.s[k];
    u += model.mass[k] * model.gravity * (y_joint + model.com_offset[k] * s);
    y_joint += model.length[k] * s;
  }
  return u;
}

std::vector<double> mass_matrix(std::span<const double> q, const ChainModel& model) {
  check_dims(q, model);
  const Eigen::MatrixXd M = inertia(q, model);
  std::vector<double> out(static_cast<std::size_t>(M.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), M.rows(), M.cols()) = M;
  return out;
}

double kinetic_energy(std::span<const double> q, std::span<const double> qdot,
                      const ChainModel& model) {
  check_dims(q, model);
  check_dims(qdot, model);
  const Eigen::MatrixXd M = inertia(q, model);
  const Eigen::Map<const Eigen::VectorXd> v(qdot.data(), static_cast<Eigen::Index>(qdot.size()));
  return 0.5 * v.dot(M * v);
}

void step_dynamics(RobotState& state, std::span<const double> actuation, const ChainModel& model,
                   double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  check_dims(state.q, model);
  check_dims(state.qdot, model);
  check_dims(actuation, model);
  const std::size_t n = model.n();
  const auto N = static_cast<Eigen::Index>(n);

  const Eigen::MatrixXd M = inertia(state.q, model);
  const auto g = gravity_torques(state.q, model);

  const Eigen::VectorXd qdot = Eigen::Map<const Eigen::VectorXd>(state.qdot.data(), N);
  Eigen::VectorXd rhs = M * qdot;
  Eigen::MatrixXd lhs = M;
  for (std::size_t i = 0; i < n; ++i) {
    const auto I = static_cast<Eigen::Index>(i);
    rhs(I) += dt * (actuation[i] - g[i]);
    lhs(I, I) += dt * model.damping[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rhs(static_cast<Eigen::Index>(i)))) {
      throw SimulationFault("non-finite load at joint " + std::to_string(i + 1) +
                            " (t = " + std::to_string(state.t) + " s)");
    }
  }

  // Inelastic stops as an active set: a joint that would cross its limit is
  // driven exactly onto it and the free joints are re-solved against that
  // prescribed motion, so the stop's reaction reaches the rest of the chain.
  std::vector<int> stop(n, 0);  // -1 lower, +1 upper, 0 free
  Eigen::VectorXd v(N);
  for (std::size_t pass = 0; pass <= n; ++pass) {
    std::vector<Eigen::Index> free_idx;
    for (std::size_t i = 0; i < n; ++i) {
      const auto I = static_cast<Eigen::Index>(i);
      if (stop[i]) {
        v(I) = (static_cast<double>(stop[i]) * model.q_max[i] - state.q[i]) / dt;
      } else {
        free_idx.push_back(I);
      }
    }
    if (!free_idx.empty()) {
      const auto F = static_cast<Eigen::Index>(free_idx.size());
      Eigen::MatrixXd A(F, F);
      Eigen::VectorXd b(F);
      for (Eigen::Index r = 0; r < F; ++r) {
        b(r) = rhs(free_idx[r]);
        for (std::size_t j = 0; j < n; ++j) {
          if (stop[j]) b(r) -= lhs(free_idx[r], static_cast<Eigen::Index>(j)) * v(static_cast<Eigen::Index>(j));
        }
        for (Eigen::Index c = 0; c < F; ++c) A(r, c) = lhs(free_idx[r], free_idx[c]);
      }
      const Eigen::VectorXd vf = A.llt().solve(b);
      for (Eigen::Index r = 0; r < F; ++r) v(free_idx[r]) = vf(r);
    }

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (stop[i]) continue;
      const double q = state.q[i] + dt * v(static_cast<Eigen::Index>(i));
      if (q > model.q_max[i]) {
        stop[i] = 1;
        changed = true;
      } else if (q < -model.q_max[i]) {
        stop[i] = -1;
        changed = true;
      }
    }
    if (!changed) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double vi = v(static_cast<Eigen::Index>(i));
    if (!std::isfinite(vi)) {
      throw SimulationFault("non-finite state at joint " + std::to_string(i + 1) +
                            " (t = " + std::to_string(state.t) + " s)");
    }
    if (stop[i]) {
      state.q[i] = static_cast<double>(stop[i]) * model.q_max[i];
      state.qdot[i] = 0.0;
    } else {
      state.q[i] += dt * vi;
      state.qdot[i] = vi;
    }
  }
}

double encoder_resolution() { return units::deg_to_rad(0.09); }

double encoder_read(double q) {
  const double step = encoder_resolution();
  return std::round(q / step) * step;
}

}  // namespace sponge
