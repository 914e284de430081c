#include "sponge/bus.hpp"

#include <cmath>

#include "sponge/errors.hpp"

namespace sponge {

namespace {

void check(const BusConfig& cfg) {
  if (!(cfg.bit_rate > 0.0) || !(cfg.bits_per_target > 0.0) || !(cfg.f_s > 0.0)) {
    throw ConfigError("bus bit_rate, bits_per_target and f_s must be > 0");
  }
}

}  // namespace

std::size_t max_targets(const BusConfig& cfg) {
  check(cfg);
  return static_cast<std::size_t>(std::floor(cfg.bit_rate / (cfg.bits_per_target * cfg.f_s)));
}

ScheduleReport schedule(std::size_t targets, const BusConfig& cfg) {
  check(cfg);
  if (targets == 0) throw ConfigError("schedule needs at least one target");
  ScheduleReport r;
  r.targets = targets;
  r.max_targets = max_targets(cfg);
  r.feasible = targets <= r.max_targets;
  const double bits_per_cycle = static_cast<double>(targets) * cfg.bits_per_target;
  r.f_s = r.feasible ? cfg.f_s : cfg.bit_rate / bits_per_cycle;
  r.cycle_s = 1.0 / r.f_s;
  r.utilization = bits_per_cycle * r.f_s / cfg.bit_rate;
  r.data_age_s.reserve(targets);
  for (std::size_t k = 1; k <= targets; ++k) {
    r.data_age_s.push_back(static_cast<double>(k) * cfg.bits_per_target / cfg.bit_rate);
  }
  return r;
}

WireCount wire_count(std::size_t actuators, Variant variant) {
  if (actuators == 0) throw ConfigError("wire_count needs at least one actuator");
  if (variant == Variant::Modular) return {5, 1};
  return {3 * actuators, 2 * actuators};
}

}  // namespace sponge
