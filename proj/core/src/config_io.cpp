#include "sponge/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "sponge/errors.hpp"
#include "sponge/units.hpp"

namespace sponge {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

// Shortest text that parses back to the same double.
std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last != first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw ConfigError("invalid number '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_count(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid count '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(what));
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

// One per-actuator field. `get` returns nullopt when the field does not apply
// (valve fields of the other valve type).
struct ActuatorField {
  std::string group;  // actuator | bellows | valve
  std::string name;
  std::function<std::optional<std::string>(const ActuatorSpec&)> get;
  std::function<void(ActuatorSpec&, std::string_view)> set;
};

template <class Getter, class Setter>
ActuatorField number_field(std::string group, std::string name, Getter get, Setter set) {
  const std::string key = group + "." + name;
  return {group, name,
          [get](const ActuatorSpec& a) -> std::optional<std::string> {
            return format_exact(get(a));
          },
          [set, key](ActuatorSpec& a, std::string_view v) { set(a, parse_number(v, key)); }};
}

ProportionalValveSpec& proportional(ActuatorSpec& a, const std::string& key) {
  auto* v = std::get_if<ProportionalValveSpec>(&a.valve);
  if (!v) throw ConfigError(key + " requires valve.type = proportional");
  return *v;
}

BinaryValveSpec& binary(ActuatorSpec& a, const std::string& key) {
  auto* v = std::get_if<BinaryValveSpec>(&a.valve);
  if (!v) throw ConfigError(key + " requires valve.type = binary");
  return *v;
}

template <class Member>
ActuatorField proportional_field(std::string name, Member member) {
  const std::string key = "valve." + name;
  return {"valve", name,
          [member](const ActuatorSpec& a) -> std::optional<std::string> {
            if (const auto* v = std::get_if<ProportionalValveSpec>(&a.valve)) {
              return format_exact(v->*member);
            }
            return std::nullopt;
          },
          [member, key](ActuatorSpec& a, std::string_view v) {
            proportional(a, key).*member = parse_number(v, key);
          }};
}

template <class Member>
ActuatorField binary_field(std::string name, Member member) {
  const std::string key = "valve." + name;
  return {"valve", name,
          [member](const ActuatorSpec& a) -> std::optional<std::string> {
            if (const auto* v = std::get_if<BinaryValveSpec>(&a.valve)) {
              return format_exact(v->*member);
            }
            return std::nullopt;
          },
          [member, key](ActuatorSpec& a, std::string_view v) {
            binary(a, key).*member = parse_number(v, key);
          }};
}

const std::vector<ActuatorField>& actuator_fields() {
  static const std::vector<ActuatorField> fields = [] {
    std::vector<ActuatorField> f;
    f.push_back(number_field(
        "actuator", "diameter", [](const ActuatorSpec& a) { return a.diameter; },
        [](ActuatorSpec& a, double v) { a.diameter = v; }));
    f.push_back(number_field(
        "actuator", "height", [](const ActuatorSpec& a) { return a.height; },
        [](ActuatorSpec& a, double v) { a.height = v; }));
    f.push_back(number_field(
        "actuator", "mass", [](const ActuatorSpec& a) { return a.mass; },
        [](ActuatorSpec& a, double v) { a.mass = v; }));
    f.push_back(number_field(
        "actuator", "q_max", [](const ActuatorSpec& a) { return a.q_max; },
        [](ActuatorSpec& a, double v) { a.q_max = v; }));
    f.push_back({"actuator", "joint_axis",
                 [](const ActuatorSpec& a) -> std::optional<std::string> {
                   return to_string(a.joint_axis);
                 },
                 [](ActuatorSpec& a, std::string_view v) {
                   a.joint_axis = parse_joint_axis(std::string(v));
                 }});

    f.push_back({"bellows", "kind",
                 [](const ActuatorSpec& a) -> std::optional<std::string> {
                   return to_string(a.bellows.kind);
                 },
                 [](ActuatorSpec& a, std::string_view v) {
                   a.bellows.kind = parse_bellows_kind(std::string(v));
                 }});
    f.push_back(number_field(
        "bellows", "p_max", [](const ActuatorSpec& a) { return a.bellows.p_max; },
        [](ActuatorSpec& a, double v) { a.bellows.p_max = v; }));
    f.push_back(number_field(
        "bellows", "torque_gain", [](const ActuatorSpec& a) { return a.bellows.torque_gain; },
        [](ActuatorSpec& a, double v) { a.bellows.torque_gain = v; }));
    f.push_back(number_field(
        "bellows", "k0", [](const ActuatorSpec& a) { return a.bellows.k0; },
        [](ActuatorSpec& a, double v) { a.bellows.k0 = v; }));
    f.push_back(number_field(
        "bellows", "k1", [](const ActuatorSpec& a) { return a.bellows.k1; },
        [](ActuatorSpec& a, double v) { a.bellows.k1 = v; }));
    f.push_back(number_field(
        "bellows", "damping", [](const ActuatorSpec& a) { return a.bellows.damping; },
        [](ActuatorSpec& a, double v) { a.bellows.damping = v; }));
    f.push_back(number_field(
        "bellows", "volume", [](const ActuatorSpec& a) { return a.bellows.volume; },
        [](ActuatorSpec& a, double v) { a.bellows.volume = v; }));
    f.push_back({"bellows", "fatigue_cycles",
                 [](const ActuatorSpec& a) -> std::optional<std::string> {
                   return std::to_string(a.bellows.fatigue_cycles);
                 },
                 [](ActuatorSpec& a, std::string_view v) {
                   a.bellows.fatigue_cycles = parse_count(v, "bellows.fatigue_cycles");
                 }});
    f.push_back(number_field(
        "bellows", "failure_offset_s",
        [](const ActuatorSpec& a) { return a.bellows.failure_offset_s; },
        [](ActuatorSpec& a, double v) { a.bellows.failure_offset_s = v; }));
    f.push_back({"bellows", "fatigue_censored",
                 [](const ActuatorSpec& a) -> std::optional<std::string> {
                   return format_bool(a.bellows.fatigue_censored);
                 },
                 [](ActuatorSpec& a, std::string_view v) {
                   a.bellows.fatigue_censored = parse_bool(v, "bellows.fatigue_censored");
                 }});

    // valve.type must be applied before the type-specific valve fields.
    f.push_back({"valve", "type",
                 [](const ActuatorSpec& a) -> std::optional<std::string> {
                   return std::holds_alternative<ProportionalValveSpec>(a.valve) ? "proportional"
                                                                                 : "binary";
                 },
                 [](ActuatorSpec& a, std::string_view v) {
                   if (v == "proportional") {
                     if (!std::holds_alternative<ProportionalValveSpec>(a.valve)) {
                       a.valve = ProportionalValveSpec{};
                     }
                   } else if (v == "binary") {
                     if (!std::holds_alternative<BinaryValveSpec>(a.valve)) {
                       a.valve = BinaryValveSpec{};
                     }
                   } else {
                     throw ConfigError("unknown valve.type '" + std::string(v) + "'");
                   }
                 }});
    f.push_back(proportional_field("tau", &ProportionalValveSpec::tau));
    f.push_back(proportional_field("resolution", &ProportionalValveSpec::resolution));
    f.push_back(
        proportional_field("dead_time_per_stage", &ProportionalValveSpec::dead_time_per_stage));
    f.push_back(binary_field("conductance", &BinaryValveSpec::conductance));
    f.push_back(binary_field("f_pwm", &BinaryValveSpec::f_pwm));
    f.push_back(binary_field("switching_life", &BinaryValveSpec::switching_life));
    f.push_back(binary_field("degradation_cycles", &BinaryValveSpec::degradation_cycles));
    return f;
  }();
  return fields;
}

struct GlobalField {
  std::string key;
  std::function<std::optional<std::string>(const TwinConfig&)> get;
  std::function<void(TwinConfig&, std::string_view)> set;
};

template <class Ref>
GlobalField global_number(std::string key, Ref ref) {
  return {key,
          [ref](const TwinConfig& c) -> std::optional<std::string> {
            return format_exact(ref(c));
          },
          [ref, key](TwinConfig& c, std::string_view v) { ref(c) = parse_number(v, key); }};
}

// Keys consumed while building the defaults; not settable afterwards.
const std::set<std::string>& structural_keys() {
  static const std::set<std::string> keys{"robot.variant", "robot.n"};
  return keys;
}

const std::vector<GlobalField>& global_fields() {
  static const std::vector<GlobalField> fields = [] {
    std::vector<GlobalField> f;
    f.push_back({"robot.base_orientation",
                 [](const TwinConfig& c) -> std::optional<std::string> {
                   return to_string(c.robot.base_orientation);
                 },
                 [](TwinConfig& c, std::string_view v) {
                   c.robot.base_orientation = parse_base_orientation(std::string(v));
                 }});
    f.push_back(global_number("sim.dt", [](auto& c) -> auto& { return c.robot.dt; }));
    f.push_back(global_number("supply.p_source_d",
                              [](auto& c) -> auto& { return c.robot.supply.p_source_d; }));
    f.push_back(global_number("supply.q_src_max",
                              [](auto& c) -> auto& { return c.robot.supply.q_src_max; }));
    f.push_back(global_number("supply.g_leak",
                              [](auto& c) -> auto& { return c.robot.supply.g_leak; }));
    f.push_back(global_number("supply.line_volume",
                              [](auto& c) -> auto& { return c.robot.supply.line_volume; }));
    f.push_back(global_number("supply.tau_src",
                              [](auto& c) -> auto& { return c.robot.supply.tau_src; }));
    f.push_back(
        global_number("control.kp", [](auto& c) -> auto& { return c.control.gains.kp; }));
    f.push_back(
        global_number("control.ki", [](auto& c) -> auto& { return c.control.gains.ki; }));
    f.push_back(global_number("control.out_min",
                              [](auto& c) -> auto& { return c.control.gains.out_min; }));
    f.push_back(global_number("control.out_max",
                              [](auto& c) -> auto& { return c.control.gains.out_max; }));
    f.push_back(global_number("control.integ_min",
                              [](auto& c) -> auto& { return c.control.gains.integ_min; }));
    f.push_back(global_number("control.integ_max",
                              [](auto& c) -> auto& { return c.control.gains.integ_max; }));
    f.push_back(global_number("control.d_stiff",
                              [](auto& c) -> auto& { return c.control.d_stiff; }));
    f.push_back({"control.p_stiff",
                 [](const TwinConfig& c) -> std::optional<std::string> {
                   if (!c.control.p_stiff) return std::nullopt;
                   return format_exact(*c.control.p_stiff);
                 },
                 [](TwinConfig& c, std::string_view v) {
                   c.control.p_stiff = parse_number(v, "control.p_stiff");
                 }});
    return f;
  }();
  return fields;
}

struct SplitKey {
  std::string group;
  std::optional<std::size_t> index;  // 1-based
  std::string name;
};

std::optional<SplitKey> split_actuator_key(const std::string& key) {
  const auto first = key.find('.');
  if (first == std::string::npos) return std::nullopt;
  SplitKey k;
  k.group = key.substr(0, first);
  if (k.group != "actuator" && k.group != "bellows" && k.group != "valve") return std::nullopt;
  std::string rest = key.substr(first + 1);
  const auto second = rest.find('.');
  if (second != std::string::npos) {
    const std::string idx = rest.substr(0, second);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
    if (ec != std::errc{} || ptr != idx.data() + idx.size() || v == 0) {
      throw ConfigError("invalid actuator index in key '" + key + "'");
    }
    k.index = v;
    rest = rest.substr(second + 1);
  }
  k.name = rest;
  return k;
}

const ActuatorField* find_field(const std::string& group, const std::string& name) {
  for (const auto& f : actuator_fields()) {
    if (f.group == group && f.name == name) return &f;
  }
  return nullptr;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(sv.substr(0, eq)));
    std::string value(trim(sv.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

TwinConfig parse_config(std::string_view text) {
  const auto kv = parse_key_values(text);
  auto lookup = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = kv.find(key); it != kv.end()) return it->second;
    return std::nullopt;
  };

  const Variant variant = parse_variant(lookup("robot.variant").value_or("modular"));
  const BellowsKind kind =
      parse_bellows_kind(lookup("bellows.kind").value_or(to_string(BellowsKind::Printed)));
  const std::size_t n =
      lookup("robot.n") ? parse_count(*lookup("robot.n"), "robot.n") : std::size_t{3};

  TwinConfig cfg = default_config(variant, kind, n);
  if (n == 0) {
    // default_config cannot derive per-joint settings without a joint.
    cfg.control = default_control(variant);
  }

  // Per-joint overrides of bellows.kind select that joint's preset first.
  std::vector<bool> gain_given(n, kv.count("bellows.torque_gain") > 0);
  std::vector<bool> conductance_given(n, kv.count("valve.conductance") > 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto k = lookup("bellows." + std::to_string(i + 1) + ".kind")) {
      cfg.robot.actuators[i] = preset(variant, parse_bellows_kind(*k));
    }
  }

  std::vector<std::pair<SplitKey, std::string>> overrides;
  for (const auto& [key, value] : kv) {
    if (structural_keys().count(key)) continue;
    if (auto split = split_actuator_key(key)) {
      const ActuatorField* field = find_field(split->group, split->name);
      if (!field) throw ConfigError("unknown config key '" + key + "'");
      if (split->index) {
        if (*split->index > n) {
          throw ConfigError("key '" + key + "' addresses joint beyond robot.n");
        }
        overrides.emplace_back(*split, value);
        continue;
      }
      continue;
    }
    auto it = std::find_if(global_fields().begin(), global_fields().end(),
                           [&](const GlobalField& f) { return f.key == key; });
    if (it == global_fields().end()) throw ConfigError("unknown config key '" + key + "'");
    it->set(cfg, value);
  }

  // Unindexed actuator keys, in field-table order so valve.type comes first.
  for (const auto& field : actuator_fields()) {
    if (field.group == "bellows" && field.name == "kind") continue;
    auto value = lookup(field.group + "." + field.name);
    if (!value) continue;
    for (auto& a : cfg.robot.actuators) field.set(a, *value);
  }
  for (const auto& field : actuator_fields()) {
    if (field.group == "bellows" && field.name == "kind") continue;
    for (const auto& [split, value] : overrides) {
      if (split.group != field.group || split.name != field.name) continue;
      const std::size_t i = *split.index - 1;
      field.set(cfg.robot.actuators[i], value);
      if (field.name == "torque_gain") gain_given[i] = true;
      if (field.name == "conductance") conductance_given[i] = true;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    ActuatorSpec& a = cfg.robot.actuators[i];
    a.variant = variant;
    if (!gain_given[i] && a.bellows.p_max > 0.0) {
      a.bellows.torque_gain =
          calibrated_torque_gain(a.bellows.p_max, a.bellows.k0, a.bellows.k1, a.q_max);
    }
    if (auto* bv = std::get_if<BinaryValveSpec>(&a.valve); bv && !conductance_given[i]) {
      const double tau_fill = kBinaryFillTime95 / -std::log(0.05);
      bv->conductance = a.bellows.volume / (tau_fill * units::kRefPressureBar);
    }
  }
  if (!kv.count("supply.p_source_d") && n > 0 && variant == Variant::Modular) {
    cfg.robot.supply.p_source_d = cfg.robot.actuators.front().bellows.p_max;
  }
  if (n > 0 && variant == Variant::SemiModular) {
    const double p_max = cfg.robot.actuators.front().bellows.p_max;
    PiGains& g = cfg.control.gains;
    if (!kv.count("control.out_min")) g.out_min = -p_max;
    if (!kv.count("control.out_max")) g.out_max = p_max;
    if (!kv.count("control.integ_min")) g.integ_min = -p_max;
    if (!kv.count("control.integ_max")) g.integ_max = p_max;
  }
  return cfg;
}

std::string serialize_config(const TwinConfig& config) {
  std::map<std::string, std::string> kv;
  const std::size_t n = config.robot.n();
  kv["robot.n"] = std::to_string(n);
  kv["robot.variant"] =
      to_string(n > 0 ? config.robot.actuators.front().variant : Variant::Modular);
  for (const auto& f : global_fields()) {
    if (auto v = f.get(config)) kv[f.key] = *v;
  }
  if (n > 0) {
    const ActuatorSpec& base = config.robot.actuators.front();
    for (const auto& f : actuator_fields()) {
      if (auto v = f.get(base)) kv[f.group + "." + f.name] = *v;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const ActuatorSpec& a = config.robot.actuators[i];
      for (const auto& f : actuator_fields()) {
        auto v = f.get(a);
        if (!v || v == f.get(base)) continue;
        kv[f.group + "." + std::to_string(i + 1) + "." + f.name] = *v;
      }
    }
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

TwinConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void save_config(const TwinConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << serialize_config(config);
}

}  // namespace sponge
