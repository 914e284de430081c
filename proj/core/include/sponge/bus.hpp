#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sponge/model.hpp"

namespace sponge {

/// Daisy-chained I2C bus behind a fixed-cycle EtherCAT gateway.
///
/// bits_per_target = 33 lumps address, R/W, acknowledges, two data bytes and
/// framing of one read+write transaction. It is a calibration: with fast mode
/// (400 kbit/s) at a 1 kHz controller rate it yields exactly 12 targets.
struct BusConfig {
  double bit_rate = 400000.0;   // bit/s
  double bits_per_target = 33;  // bits per transaction
  double f_s = 1000.0;          // Hz

  bool operator==(const BusConfig&) const = default;
};

struct ScheduleReport {
  std::size_t targets = 0;
  std::size_t max_targets = 0;
  bool feasible = false;
  /// Sampling frequency the schedule runs at; reduced below cfg.f_s when
  /// the requested one cannot serve every target.
  double f_s = 0.0;
  double cycle_s = 0.0;
  double utilization = 0.0;
  /// Time from cycle start until target k's transaction completes.
  std::vector<double> data_age_s;
};

/// floor(bit_rate / (bits_per_target * f_s)); throws ConfigError on
/// non-positive parameters.
std::size_t max_targets(const BusConfig& cfg);

/// Round-robin schedule of `targets` transactions per controller cycle.
ScheduleReport schedule(std::size_t targets, const BusConfig& cfg);

struct WireCount {
  std::size_t wires = 0;
  std::size_t tubes = 0;
};

/// Cables and tubes routed through the robot body. The modular robot keeps
/// five wires (two I2C, three power) and one supply tube; the semi-modular
/// robot routes three encoder conductors and two bellows tubes per joint.
WireCount wire_count(std::size_t actuators, Variant variant);

}  // namespace sponge
