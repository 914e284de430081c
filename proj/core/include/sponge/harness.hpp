#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sponge/model.hpp"

namespace sponge {

// Pass/fail thresholds used by `--check` and the acceptance suite.
inline constexpr double kTrackingMeanRmseLimitDeg = 3.0;
inline constexpr double kTrackingJointRmseLimitDeg = 4.0;
inline constexpr double kAirtightHoldToleranceBar = 0.005;
inline constexpr double kLeakPlateauBar = 0.30;
inline constexpr double kLeakPlateauToleranceBar = 0.02;

enum class ExperimentKind { Airtightness, Tracking, Fatigue };
std::string to_string(ExperimentKind kind);

/// Columnar log; every column has one value per row.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return columns_.empty() ? 0 : data_.front().size(); }
  void reserve(std::size_t rows);
  void add_row(const std::vector<double>& row);
  const std::vector<double>& column(std::size_t i) const { return data_.at(i); }
  const std::vector<double>& column(const std::string& name) const;

  /// Comma separated, header line first, numbers with 9 significant digits.
  std::string to_csv() const;
  static TimeSeries from_csv(const std::string& text);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> data_;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::Tracking;
  TimeSeries series;
  std::map<std::string, double> summary;
  std::map<std::string, std::string> metadata;

  /// Flat `key = value` text: metadata first, then summary metrics.
  std::string summary_text() const;
};

/// Writes `<stem>.csv` and `<stem>_summary.txt` into `dir`.
void write_result(const ExperimentResult& result, const std::filesystem::path& dir,
                  const std::string& stem);

// ---------------------------------------------------------------- airtightness

struct StairStep {
  double setpoint_bar = 0.0;
  double hold_s = 0.0;
};

/// 0.25 bar steps held 20 s each, up to `top_bar`. A stand-in profile: the
/// measured leak test is only available as a plot.
std::vector<StairStep> default_staircase(double top_bar = 1.5, double step_bar = 0.25,
                                         double hold_s = 20.0);

/// Parses "p:hold,p:hold,..." (bar and seconds).
std::vector<StairStep> parse_staircase(const std::string& text);

/// Raises the supply setpoint along `staircase` with every microvalve
/// closed, starting from a vented line. Deviations are evaluated after
/// `settle_s` of each hold.
ExperimentResult run_airtightness(const TwinConfig& config, const std::vector<StairStep>& staircase,
                                  double settle_s = 2.0);

// -------------------------------------------------------------------- tracking

/// Phase-shifted trapezoidal ramps. Joint i (0-based) rests at 0 for
/// i * phase_shift_s, ramps to +amplitude, then cycles
/// hold, ramp to -amplitude, hold, ramp to +amplitude.
struct RampSuite {
  double amplitude_deg = 15.0;
  double rate_deg_s = 5.0;
  double hold_s = 5.0;
  double duration_s = 120.0;
  double phase_shift_s = 2.0;

  double desired_deg(double t, std::size_t joint) const;
};

/// Closed-loop run of the configured architecture. Throws ConfigError when
/// the trajectory leaves any joint's range.
ExperimentResult run_tracking(const TwinConfig& config, const RampSuite& trajectory);

/// RMSE of desired vs measured angle per joint, recomputed from a tracking log.
std::vector<double> rmse_from_series(const TimeSeries& series, std::size_t joints);

// --------------------------------------------------------------------- fatigue

struct Lifetime {
  std::uint64_t cycles = 0;
  double seconds = 0.0;
  std::uint64_t hours = 0;
  std::uint64_t minutes = 0;
  double rem_seconds = 0.0;
  bool censored = false;

  std::string to_string() const;
};

Lifetime fatigue_lifetime(const BellowsSpec& bellows, double pressurize_s = 10.0,
                          double vent_s = 10.0);

/// Cycle accounting of the pressurize/vent protocol. With
/// `simulate_cycles > 0` a pressure trace of that many cycles is simulated
/// through a proportional valve and logged.
ExperimentResult run_fatigue(const BellowsSpec& bellows, double pressurize_s = 10.0,
                             double vent_s = 10.0, std::uint64_t simulate_cycles = 0,
                             double dt = 0.001);

/// Hours until `cycles` switching cycles at one cycle per PWM period.
double valve_wear_hours(double cycles, double f_pwm);

// ------------------------------------------------------------- gravity margin

struct JointMargin {
  double available = 0.0;  // torque_gain * p_max, N·m
  double load = 0.0;       // |gravity torque| at q = 0, N·m
  double margin = 0.0;
};

struct GravityMarginReport {
  BaseOrientation orientation = BaseOrientation::VerticalUp;
  std::vector<JointMargin> joints;
  std::size_t max_stackable = 0;
  /// True when every chain length up to `search_limit` keeps positive margins.
  bool unbounded = false;
  std::size_t search_limit = 0;
};

/// Static torque budget of the configured chain at q = 0 in `orientation`,
/// plus the longest stack whose joints all keep a positive margin (joints
/// beyond the configured ones repeat the last actuator).
GravityMarginReport gravity_margin(const RobotConfig& config, BaseOrientation orientation,
                                   std::size_t search_limit = 64);

// ----------------------------------------------------------------------- sweep

struct SweepPoint {
  double kp = 0.0;
  double ki = 0.0;
  std::vector<double> rmse_deg;
  double mean_rmse_deg = 0.0;
  double max_rmse_deg = 0.0;
  std::string error;  // non-empty when the run faulted
};

/// Tracking runs over the kp x ki grid, executed on up to `threads` workers.
/// Results are ordered by (kp, ki) grid position regardless of completion order.
std::vector<SweepPoint> run_sweep(const TwinConfig& config, const std::vector<double>& kp,
                                  const std::vector<double>& ki, const RampSuite& trajectory,
                                  unsigned threads = 0);

}  // namespace sponge
