// sponge-twin: command line front end of the digital twin.
//
// Exit codes: 0 success, 1 configuration error, 2 simulation fault,
// 3 acceptance threshold missed (only with --check).

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sponge/bus.hpp"
#include "sponge/config_io.hpp"
#include "sponge/errors.hpp"
#include "sponge/harness.hpp"
#include "sponge/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFault = 2;
constexpr int kExitThreshold = 3;

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::string variant;
  std::string bellows = "printed";
  std::size_t n = 3;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Config file (key = value)");
  app->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  app->add_option("--variant", c.variant, "semi-modular | modular (without --config)");
  app->add_option("--bellows", c.bellows, "printed | cast (without --config)")
      ->capture_default_str();
  app->add_option("-n,--actuators", c.n, "Actuator count (without --config)")
      ->capture_default_str();
}

sponge::TwinConfig resolve_config(const Common& c) {
  if (!c.config_path.empty()) return sponge::load_config(c.config_path);
  const auto variant = sponge::parse_variant(c.variant.empty() ? "modular" : c.variant);
  return sponge::default_config(variant, sponge::parse_bellows_kind(c.bellows), c.n);
}

void print_summary(const sponge::ExperimentResult& r) { std::cout << r.summary_text(); }

void write_text(const std::filesystem::path& dir, const std::string& name,
                const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw sponge::ConfigError("cannot write " + (dir / name).string());
  out << text;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
    if (!item.empty()) out.push_back(sponge::parse_number(item, "list entry"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital twin of modular pneumatic articulated soft robots"};
  app.require_subcommand(1);

  Common common;

  // airtight
  auto* airtight = app.add_subcommand("airtight", "Supply-line leak test with closed microvalves");
  add_common(airtight, common);
  std::string staircase_text;
  bool early_design = false;
  double settle_s = 2.0;
  bool airtight_check = false;
  airtight->add_option("--staircase", staircase_text, "Setpoints as 'bar:seconds,...'");
  airtight->add_flag("--early-design", early_design, "Use the leaky split-frame supply preset");
  airtight->add_option("--settle", settle_s, "Settling time excluded from hold deviations")
      ->capture_default_str();
  airtight->add_flag("--check", airtight_check, "Exit 3 when the hold/plateau bound is missed");

  // track
  auto* track = app.add_subcommand("track", "Closed-loop ramp tracking");
  add_common(track, common);
  sponge::RampSuite ramps;
  bool track_check = false;
  track->add_option("--duration", ramps.duration_s, "Seconds")->capture_default_str();
  track->add_option("--amplitude", ramps.amplitude_deg, "Ramp amplitude, deg")
      ->capture_default_str();
  track->add_option("--rate", ramps.rate_deg_s, "Ramp rate, deg/s")->capture_default_str();
  track->add_option("--hold", ramps.hold_s, "Hold time, s")->capture_default_str();
  track->add_option("--phase-shift", ramps.phase_shift_s, "Per-joint delay, s")
      ->capture_default_str();
  track->add_flag("--check", track_check, "Exit 3 when the RMSE bounds are missed");

  // fatigue
  auto* fatigue = app.add_subcommand("fatigue", "Bellows lifetime under the pressurize/vent test");
  add_common(fatigue, common);
  bool fatigue_all = false;
  std::uint64_t simulate = 0;
  double pressurize_s = 10.0;
  double vent_s = 10.0;
  fatigue->add_flag("--all", fatigue_all, "Report all four stock bellows");
  fatigue->add_option("--simulate", simulate, "Simulate a pressure trace of K cycles");
  fatigue->add_option("--pressurize", pressurize_s, "Seconds at p_max")->capture_default_str();
  fatigue->add_option("--vent", vent_s, "Seconds vented")->capture_default_str();

  // bus
  auto* bus = app.add_subcommand("bus", "I2C daisy-chain capacity and schedule");
  add_common(bus, common);
  sponge::BusConfig bus_cfg;
  std::size_t targets = 0;
  bool bus_check = false;
  bus->add_option("--bit-rate", bus_cfg.bit_rate, "bit/s")->capture_default_str();
  bus->add_option("--bits-per-target", bus_cfg.bits_per_target, "bits per transaction")
      ->capture_default_str();
  bus->add_option("--fs", bus_cfg.f_s, "Controller sampling frequency, Hz")->capture_default_str();
  bus->add_option("--targets", targets, "Targets to schedule (default: robot n)");
  bus->add_flag("--check", bus_check, "Exit 3 when the schedule is infeasible");

  // gravity
  auto* gravity = app.add_subcommand("gravity", "Static torque margin against gravity");
  add_common(gravity, common);
  std::string orientation = "horizontal";
  std::size_t search_limit = 64;
  gravity->add_option("--orientation", orientation, "horizontal | vertical-up")
      ->capture_default_str();
  gravity->add_option("--search-limit", search_limit, "Longest chain examined")
      ->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Tracking RMSE over a PI gain grid");
  add_common(sweep, common);
  std::string kp_list;
  std::string ki_list;
  unsigned threads = 0;
  sweep->add_option("--kp", kp_list, "Comma separated kp values")->required();
  sweep->add_option("--ki", ki_list, "Comma separated ki values")->required();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--duration", ramps.duration_s, "Seconds per run")->capture_default_str();

  // validate
  auto* validate = app.add_subcommand("validate", "Check a configuration");
  add_common(validate, common);
  bool canonical = false;
  validate->add_flag("--canonical", canonical, "Print the canonical serialization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const std::filesystem::path out_dir = common.out_dir;

    if (*airtight) {
      sponge::TwinConfig cfg = resolve_config(common);
      if (early_design) cfg.robot.supply = sponge::early_design_supply();
      const auto stairs = staircase_text.empty() ? sponge::default_staircase()
                                                 : sponge::parse_staircase(staircase_text);
      const auto r = sponge::run_airtightness(cfg, stairs, settle_s);
      sponge::write_result(r, out_dir, "airtight");
      print_summary(r);
      if (airtight_check) {
        const bool ok =
            early_design ? std::abs(r.summary.at("final_ps_bar") - sponge::kLeakPlateauBar) <=
                               sponge::kLeakPlateauToleranceBar
                         : r.summary.at("final_hold_max_dev_bar") <= sponge::kAirtightHoldToleranceBar;
        if (!ok) return kExitThreshold;
      }
    } else if (*track) {
      const auto cfg = resolve_config(common);
      const auto r = sponge::run_tracking(cfg, ramps);
      sponge::write_result(r, out_dir, "track");
      print_summary(r);
      if (track_check && (r.summary.at("mean_rmse_deg") >= sponge::kTrackingMeanRmseLimitDeg ||
                          r.summary.at("max_rmse_deg") >= sponge::kTrackingJointRmseLimitDeg)) {
        return kExitThreshold;
      }
    } else if (*fatigue) {
      std::vector<std::pair<std::string, sponge::BellowsSpec>> items;
      if (fatigue_all) {
        for (auto v : {sponge::Variant::SemiModular, sponge::Variant::Modular}) {
          for (auto k : {sponge::BellowsKind::Printed, sponge::BellowsKind::Cast}) {
            items.emplace_back(sponge::to_string(v) + "_" + sponge::to_string(k),
                               sponge::preset(v, k).bellows);
          }
        }
      } else {
        const auto cfg = resolve_config(common);
        if (cfg.robot.n() == 0) throw sponge::ConfigError("robot has no actuators");
        const auto& a = cfg.robot.actuators.front();
        items.emplace_back(sponge::to_string(a.variant) + "_" + sponge::to_string(a.bellows.kind),
                           a.bellows);
      }
      for (const auto& [name, bellows] : items) {
        const auto r = sponge::run_fatigue(bellows, pressurize_s, vent_s, simulate);
        sponge::write_result(r, out_dir, "fatigue_" + name);
        std::cout << name << ": " << r.metadata.at("lifetime") << " ("
                  << static_cast<std::uint64_t>(r.summary.at("cycles")) << " cycles, p_max "
                  << sponge::format_number(bellows.p_max) << " bar)\n";
      }
    } else if (*bus) {
      const auto cfg = resolve_config(common);
      const std::size_t n = targets ? targets : std::max<std::size_t>(cfg.robot.n(), 1);
      const auto rep = sponge::schedule(n, bus_cfg);
      const auto wires = sponge::wire_count(n, cfg.robot.variant());
      std::string text;
      text += "max_targets = " + std::to_string(rep.max_targets) + "\n";
      text += "targets = " + std::to_string(rep.targets) + "\n";
      text += "feasible = " + std::string(rep.feasible ? "true" : "false") + "\n";
      text += "f_s_hz = " + sponge::format_number(rep.f_s) + "\n";
      text += "utilization = " + sponge::format_number(rep.utilization) + "\n";
      for (std::size_t k = 0; k < rep.data_age_s.size(); ++k) {
        text += "data_age_" + std::to_string(k + 1) + "_s = " +
                sponge::format_number(rep.data_age_s[k]) + "\n";
      }
      text += "wires = " + std::to_string(wires.wires) + "\n";
      text += "tubes = " + std::to_string(wires.tubes) + "\n";
      write_text(out_dir, "bus_summary.txt", text);
      std::cout << text;
      if (bus_check && !rep.feasible) return kExitThreshold;
    } else if (*gravity) {
      const auto cfg = resolve_config(common);
      const auto rep = sponge::gravity_margin(cfg.robot, sponge::parse_base_orientation(orientation),
                                              search_limit);
      std::string text = "orientation = " + sponge::to_string(rep.orientation) + "\n";
      for (std::size_t i = 0; i < rep.joints.size(); ++i) {
        const auto& j = rep.joints[i];
        const std::string tag = "joint" + std::to_string(i + 1);
        text += tag + "_available_nm = " + sponge::format_number(j.available) + "\n";
        text += tag + "_load_nm = " + sponge::format_number(j.load) + "\n";
        text += tag + "_margin_nm = " + sponge::format_number(j.margin) + "\n";
      }
      text += "max_stackable = " + std::to_string(rep.max_stackable) + "\n";
      text += "unbounded = " + std::string(rep.unbounded ? "true" : "false") + "\n";
      write_text(out_dir, "gravity_summary.txt", text);
      std::cout << text;
    } else if (*sweep) {
      const auto cfg = resolve_config(common);
      const auto points =
          sponge::run_sweep(cfg, parse_list(kp_list), parse_list(ki_list), ramps, threads);
      std::string csv = "kp,ki,mean_rmse_deg,max_rmse_deg";
      for (std::size_t j = 0; j < cfg.robot.n(); ++j) csv += ",rmse_q" + std::to_string(j + 1) + "_deg";
      csv += ",error\n";
      for (const auto& p : points) {
        csv += sponge::format_number(p.kp) + "," + sponge::format_number(p.ki) + ",";
        if (p.error.empty()) {
          csv += sponge::format_number(p.mean_rmse_deg) + "," + sponge::format_number(p.max_rmse_deg);
          for (double e : p.rmse_deg) csv += "," + sponge::format_number(e);
          csv += ",\n";
        } else {
          csv += "nan,nan";
          for (std::size_t j = 0; j < cfg.robot.n(); ++j) csv += ",nan";
          csv += "," + p.error + "\n";
        }
      }
      write_text(out_dir, "sweep.csv", csv);
      std::cout << csv;
    } else if (*validate) {
      const auto cfg = resolve_config(common);
      const auto violations = sponge::validate(cfg);
      for (const auto& v : violations) std::cout << v.field << ": " << v.rule << "\n";
      if (canonical) std::cout << sponge::serialize_config(cfg);
      if (!violations.empty()) return kExitConfig;
      std::cout << "ok\n";
    }
  } catch (const sponge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sponge::SimulationFault& e) {
    std::cerr << "simulation fault: " << e.what() << "\n";
    return kExitFault;
  }
  return kExitOk;
}
