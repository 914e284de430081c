#include "sponge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "sponge/config_io.hpp"
#include "sponge/dynamics.hpp"
#include "sponge/errors.hpp"
#include "sponge/pneumatics.hpp"
#include "sponge/simulator.hpp"
#include "sponge/units.hpp"

namespace sponge {

using units::deg_to_rad;
using units::rad_to_deg;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Airtightness:
      return "airtightness";
    case ExperimentKind::Tracking:
      return "tracking";
    case ExperimentKind::Fatigue:
      return "fatigue";
  }
  return "unknown";
}

// ----------------------------------------------------------------- TimeSeries

TimeSeries::TimeSeries(std::vector<std::string> columns)
    : columns_(std::move(columns)), data_(columns_.size()) {}

void TimeSeries::reserve(std::size_t rows) {
  for (auto& c : data_) c.reserve(rows);
}

void TimeSeries::add_row(const std::vector<double>& row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(columns_.size()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) data_[i].push_back(row[i]);
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::out_of_range("no column '" + name + "'");
  return data_[static_cast<std::size_t>(it - columns_.begin())];
}

std::string TimeSeries::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out += ',';
      out += format_number(data_[i][r]);
    }
    out += '\n';
  }
  return out;
}

TimeSeries TimeSeries::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  TimeSeries ts(header);
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    row.clear();
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) row.push_back(parse_number(cell, "CSV cell"));
    if (row.size() != header.size()) throw ConfigError("ragged CSV row");
    ts.add_row(row);
  }
  return ts;
}

std::string ExperimentResult::summary_text() const {
  std::string out = "experiment = " + to_string(kind) + "\n";
  for (const auto& [k, v] : metadata) out += k + " = " + v + "\n";
  for (const auto& [k, v] : summary) out += k + " = " + format_number(v) + "\n";
  return out;
}

void write_result(const ExperimentResult& result, const std::filesystem::path& dir,
                  const std::string& stem) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (stem + ".csv"));
    if (!csv) throw ConfigError("cannot write " + (dir / (stem + ".csv")).string());
    csv << result.series.to_csv();
  }
  std::ofstream summary(dir / (stem + "_summary.txt"));
  if (!summary) throw ConfigError("cannot write summary into " + dir.string());
  summary << result.summary_text();
}

// --------------------------------------------------------------- airtightness

std::vector<StairStep> default_staircase(double top_bar, double step_bar, double hold_s) {
  if (!(step_bar > 0.0)) throw ConfigError("staircase step must be > 0");
  std::vector<StairStep> steps;
  const auto count = static_cast<std::size_t>(std::llround(top_bar / step_bar));
  for (std::size_t k = 1; k <= count; ++k) {
    steps.push_back({static_cast<double>(k) * step_bar, hold_s});
  }
  return steps;
}

std::vector<StairStep> parse_staircase(const std::string& text) {
  std::vector<StairStep> steps;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("staircase entry '" + item + "' lacks ':'");
    const StairStep step{parse_number(item.substr(0, colon), "staircase pressure"),
                         parse_number(item.substr(colon + 1), "staircase hold")};
    if (step.setpoint_bar < 0.0 || step.hold_s < 0.0) {
      throw ConfigError("staircase entry '" + item + "' must be non-negative");
    }
    steps.push_back(step);
  }
  return steps;
}

ExperimentResult run_airtightness(const TwinConfig& config, const std::vector<StairStep>& staircase,
                                  double settle_s) {
  for (const auto& s : staircase) {
    if (s.hold_s < 0.0 || s.setpoint_bar < 0.0) {
      throw ConfigError("staircase entries need non-negative pressure and hold time");
    }
  }
  Simulator sim(config);
  RobotState& st = sim.state();
  sim.force_valves_closed(true);
  st.p_s = 0.0;
  std::fill(st.p.begin(), st.p.end(), 0.0);
  std::fill(st.p_d.begin(), st.p_d.end(), 0.0);

  const double dt = config.robot.dt;
  const std::vector<double> hold_q(config.robot.n(), 0.0);

  ExperimentResult r;
  r.kind = ExperimentKind::Airtightness;
  r.series = TimeSeries({"t_s", "psd_bar", "ps_bar"});
  r.metadata["profile"] = "stand-in staircase (not the measured profile)";

  const double initial = st.p_s;
  double setpoint = 0.0;
  double hold_dev = 0.0;
  double all_dev = 0.0;
  double ps_max = st.p_s;
  std::size_t hold_index = 0;

  r.series.add_row({st.t, setpoint, st.p_s});
  for (const StairStep& step : staircase) {
    setpoint = step.setpoint_bar;
    sim.set_supply_setpoint(setpoint);
    const auto n_steps = static_cast<std::uint64_t>(std::llround(step.hold_s / dt));
    const auto settle_steps = static_cast<std::uint64_t>(std::llround(settle_s / dt));
    hold_dev = 0.0;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
      sim.tick(hold_q);
      ps_max = std::max(ps_max, st.p_s);
      if (k + 1 >= settle_steps) {
        hold_dev = std::max(hold_dev, std::abs(st.p_s - setpoint));
      }
      r.series.add_row({st.t, setpoint, st.p_s});
    }
    all_dev = std::max(all_dev, hold_dev);
    ++hold_index;
  }

  r.summary["initial_ps_bar"] = initial;
  r.summary["final_ps_bar"] = st.p_s;
  r.summary["final_setpoint_bar"] = setpoint;
  r.summary["final_hold_max_dev_bar"] = hold_dev;
  r.summary["max_hold_dev_bar"] = all_dev;
  r.summary["ps_max_bar"] = ps_max;
  r.summary["holds"] = static_cast<double>(hold_index);
  r.summary["settle_s"] = settle_s;
  return r;
}

// ------------------------------------------------------------------- tracking

double RampSuite::desired_deg(double t, std::size_t joint) const {
  const double a = amplitude_deg;
  if (a == 0.0) return 0.0;
  const double t0 = t - static_cast<double>(joint) * phase_shift_s;
  if (t0 <= 0.0) return 0.0;
  const double rise = a / rate_deg_s;
  if (t0 < rise) return rate_deg_s * t0;
  const double swing = 2.0 * a / rate_deg_s;
  const double period = 2.0 * (hold_s + swing);
  const double s = std::fmod(t0 - rise, period);
  if (s < hold_s) return a;
  if (s < hold_s + swing) return a - rate_deg_s * (s - hold_s);
  if (s < 2.0 * hold_s + swing) return -a;
  return -a + rate_deg_s * (s - 2.0 * hold_s - swing);
}

namespace {

void check_trajectory(const RobotConfig& robot, const RampSuite& traj) {
  if (traj.amplitude_deg < 0.0) throw ConfigError("trajectory amplitude must be >= 0");
  if (traj.amplitude_deg > 0.0 && !(traj.rate_deg_s > 0.0)) {
    throw ConfigError("trajectory ramp rate must be > 0");
  }
  if (traj.hold_s < 0.0 || traj.duration_s < 0.0 || traj.phase_shift_s < 0.0) {
    throw ConfigError("trajectory durations must be >= 0");
  }
  for (std::size_t i = 0; i < robot.n(); ++i) {
    const double limit = rad_to_deg(robot.actuators[i].q_max);
    if (traj.amplitude_deg > limit) {
      throw ConfigError("trajectory amplitude " + format_number(traj.amplitude_deg) +
                        " deg exceeds joint " + std::to_string(i + 1) + " range of +-" +
                        format_number(limit) + " deg");
    }
  }
}

std::string joint_tag(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

ExperimentResult run_tracking(const TwinConfig& config, const RampSuite& trajectory) {
  check_trajectory(config.robot, trajectory);
  Simulator sim(config);
  const RobotState& st = sim.state();
  const std::size_t n = config.robot.n();
  const bool modular = config.robot.variant() == Variant::Modular;

  std::vector<std::string> cols{"t_s"};
  for (std::size_t i = 0; i < n; ++i) cols.push_back("q" + joint_tag(i) + "_deg");
  for (std::size_t i = 0; i < n; ++i) cols.push_back("qd" + joint_tag(i) + "_deg");
  for (std::size_t i = 0; i < n; ++i) {
    for (int s = 1; s <= 2; ++s) cols.push_back("p" + joint_tag(i) + std::to_string(s) + "_bar");
  }
  cols.push_back("ps_bar");
  for (std::size_t i = 0; i < n; ++i) {
    for (int s = 1; s <= 2; ++s) {
      cols.push_back(modular ? "u" + joint_tag(i) + std::to_string(s)
                             : "pd" + joint_tag(i) + std::to_string(s) + "_bar");
    }
  }

  ExperimentResult r;
  r.kind = ExperimentKind::Tracking;
  r.series = TimeSeries(cols);
  r.metadata["variant"] = to_string(config.robot.variant());
  r.metadata["profile"] = "stand-in ramp suite (not the measured profile)";

  const double dt = config.robot.dt;
  const auto steps = static_cast<std::uint64_t>(std::llround(trajectory.duration_s / dt));
  r.series.reserve(steps);

  std::vector<double> q_d(n, 0.0);
  std::vector<double> sq_err(n, 0.0);
  std::vector<double> row(cols.size());
  double over_supply = -std::numeric_limits<double>::infinity();
  double min_ps = std::numeric_limits<double>::infinity();

  for (std::uint64_t k = 0; k < steps; ++k) {
    const double t = st.t;
    std::size_t c = 0;
    row[c++] = t;
    for (std::size_t i = 0; i < n; ++i) {
      q_d[i] = deg_to_rad(trajectory.desired_deg(t, i));
      const double measured = encoder_read(st.q[i]);
      const double e = q_d[i] - measured;
      sq_err[i] += e * e;
      row[c++] = rad_to_deg(measured);
    }
    for (std::size_t i = 0; i < n; ++i) row[c++] = rad_to_deg(q_d[i]);
    for (std::size_t k2 = 0; k2 < 2 * n; ++k2) {
      row[c++] = st.p[k2];
      over_supply = std::max(over_supply, st.p[k2] - st.p_s);
    }
    row[c++] = st.p_s;
    min_ps = std::min(min_ps, st.p_s);

    sim.tick(q_d);

    for (std::size_t k2 = 0; k2 < 2 * n; ++k2) {
      row[c++] = modular ? static_cast<double>(st.u[k2]) : st.p_d[k2];
    }
    r.series.add_row(row);
  }

  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rmse = steps ? rad_to_deg(std::sqrt(sq_err[i] / static_cast<double>(steps))) : 0.0;
    r.summary["rmse_q" + joint_tag(i) + "_deg"] = rmse;
    sum += rmse;
    worst = std::max(worst, rmse);
  }
  r.summary["mean_rmse_deg"] = n ? sum / static_cast<double>(n) : 0.0;
  r.summary["max_rmse_deg"] = worst;
  r.summary["steps"] = static_cast<double>(steps);
  r.summary["duration_s"] = static_cast<double>(steps) * dt;
  if (steps) {
    r.summary["min_ps_bar"] = min_ps;
    r.summary["max_bellows_above_supply_bar"] = over_supply;
  }
  if (modular) {
    std::uint64_t total = 0;
    std::uint64_t most = 0;
    for (auto s : st.switch_count) {
      total += s;
      most = std::max(most, s);
    }
    r.summary["valve_edges_total"] = static_cast<double>(total);
    r.summary["valve_edges_max"] = static_cast<double>(most);
  }
  return r;
}

std::vector<double> rmse_from_series(const TimeSeries& series, std::size_t joints) {
  std::vector<double> out(joints, 0.0);
  const std::size_t rows = series.rows();
  if (rows == 0) return out;
  for (std::size_t i = 0; i < joints; ++i) {
    const auto& q = series.column("q" + joint_tag(i) + "_deg");
    const auto& qd = series.column("qd" + joint_tag(i) + "_deg");
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += (qd[r] - q[r]) * (qd[r] - q[r]);
    out[i] = std::sqrt(acc / static_cast<double>(rows));
  }
  return out;
}

// -------------------------------------------------------------------- fatigue

std::string Lifetime::to_string() const {
  std::string s = censored ? ">" : "";
  s += std::to_string(hours) + " h " + std::to_string(minutes) + " min " +
       format_number(rem_seconds) + " s";
  return s;
}

Lifetime fatigue_lifetime(const BellowsSpec& bellows, double pressurize_s, double vent_s) {
  if (!(pressurize_s > 0.0) || !(vent_s > 0.0)) {
    throw ConfigError("fatigue protocol durations must be > 0");
  }
  Lifetime l;
  l.cycles = bellows.fatigue_cycles;
  l.censored = bellows.fatigue_censored;
  l.seconds = static_cast<double>(l.cycles) * (pressurize_s + vent_s) + bellows.failure_offset_s;
  const double whole = std::floor(l.seconds);
  const auto total = static_cast<std::uint64_t>(whole);
  l.hours = total / 3600;
  l.minutes = (total % 3600) / 60;
  l.rem_seconds = static_cast<double>(total % 60) + (l.seconds - whole);
  return l;
}

ExperimentResult run_fatigue(const BellowsSpec& bellows, double pressurize_s, double vent_s,
                             std::uint64_t simulate_cycles, double dt) {
  const Lifetime life = fatigue_lifetime(bellows, pressurize_s, vent_s);
  ExperimentResult r;
  r.kind = ExperimentKind::Fatigue;
  r.series = TimeSeries({"t_s", "pd_bar", "p_bar"});
  r.metadata["bellows"] = to_string(bellows.kind);
  r.metadata["lifetime"] = life.to_string();
  r.summary["p_max_bar"] = bellows.p_max;
  r.summary["cycles"] = static_cast<double>(life.cycles);
  r.summary["lifetime_s"] = life.seconds;
  r.summary["lifetime_hours"] = life.seconds / 3600.0;
  r.summary["hours"] = static_cast<double>(life.hours);
  r.summary["minutes"] = static_cast<double>(life.minutes);
  r.summary["seconds"] = life.rem_seconds;
  r.summary["censored"] = life.censored ? 1.0 : 0.0;

  if (simulate_cycles > 0) {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    const ProportionalValveSpec valve{};
    DelayLine line(0, 0.0);
    const auto press_steps = static_cast<std::uint64_t>(std::llround(pressurize_s / dt));
    const auto vent_steps = static_cast<std::uint64_t>(std::llround(vent_s / dt));
    double p = 0.0;
    std::uint64_t tick = 0;
    std::uint64_t detected = 0;
    bool high = false;
    r.series.reserve(simulate_cycles * (press_steps + vent_steps) + 1);
    r.series.add_row({0.0, 0.0, 0.0});
    for (std::uint64_t c = 0; c < simulate_cycles; ++c) {
      for (std::uint64_t k = 0; k < press_steps + vent_steps; ++k) {
        const double pd = k < press_steps ? bellows.p_max : 0.0;
        p = std::clamp(proportional_valve_step(p, pd, valve, line, dt), 0.0, bellows.p_max);
        ++tick;
        if (!high && p > 0.5 * bellows.p_max) {
          high = true;
          ++detected;
        } else if (high && p < 0.5 * bellows.p_max) {
          high = false;
        }
        r.series.add_row({static_cast<double>(tick) * dt, pd, p});
      }
    }
    r.summary["simulated_cycles"] = static_cast<double>(simulate_cycles);
    r.summary["detected_cycles"] = static_cast<double>(detected);
  }
  return r;
}

double valve_wear_hours(double cycles, double f_pwm) {
  if (!(f_pwm > 0.0)) throw ConfigError("PWM frequency must be > 0");
  if (cycles < 0.0) throw ConfigError("cycle count must be >= 0");
  return cycles / (f_pwm * 3600.0);
}

// ------------------------------------------------------------- gravity margin

GravityMarginReport gravity_margin(const RobotConfig& config, BaseOrientation orientation,
                                   std::size_t search_limit) {
  if (config.n() == 0) throw ConfigError("gravity_margin needs at least one actuator");
  GravityMarginReport rep;
  rep.orientation = orientation;
  rep.search_limit = std::max(search_limit, config.n());

  auto margins_for = [&](std::size_t n) {
    RobotConfig c = config;
    c.base_orientation = orientation;
    c.actuators.resize(n, config.actuators.back());
    const ChainModel chain = ChainModel::from_config(c);
    const std::vector<double> zero(n, 0.0);
    const auto load = gravity_torques(zero, chain);
    std::vector<JointMargin> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const BellowsSpec& b = c.actuators[i].bellows;
      out[i].available = b.torque_gain * b.p_max;
      out[i].load = std::abs(load[i]);
      out[i].margin = out[i].available - out[i].load;
    }
    return out;
  };
  auto all_positive = [](const std::vector<JointMargin>& m) {
    return std::all_of(m.begin(), m.end(), [](const JointMargin& j) { return j.margin > 0.0; });
  };

  rep.joints = margins_for(config.n());
  rep.max_stackable = 0;
  for (std::size_t n = 1; n <= rep.search_limit; ++n) {
    if (!all_positive(margins_for(n))) break;
    rep.max_stackable = n;
  }
  rep.unbounded = rep.max_stackable == rep.search_limit;
  return rep;
}

// ---------------------------------------------------------------------- sweep

std::vector<SweepPoint> run_sweep(const TwinConfig& config, const std::vector<double>& kp,
                                  const std::vector<double>& ki, const RampSuite& trajectory,
                                  unsigned threads) {
  std::vector<SweepPoint> points;
  for (double p : kp) {
    for (double i : ki) {
      SweepPoint s;
      s.kp = p;
      s.ki = i;
      points.push_back(s);
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, points.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < points.size(); idx = next++) {
      SweepPoint& pt = points[idx];
      TwinConfig c = config;
      c.control.gains.kp = pt.kp;
      c.control.gains.ki = pt.ki;
      try {
        const ExperimentResult r = run_tracking(c, trajectory);
        for (std::size_t j = 0; j < c.robot.n(); ++j) {
          pt.rmse_deg.push_back(r.summary.at("rmse_q" + joint_tag(j) + "_deg"));
        }
        pt.mean_rmse_deg = r.summary.at("mean_rmse_deg");
        pt.max_rmse_deg = r.summary.at("max_rmse_deg");
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return points;
}

}  // namespace sponge
