#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>
#include <json.hpp>

#include "errors.hpp"
#include "units.hpp"

namespace cotrap {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Document normalization. YAML and JSON inputs both land in a json tree;
// YAML scalars stay strings so "1350 V" and "1350" travel the same path.

json yaml_to_tree(const YAML::Node& node, const std::string& path) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) {
        const std::string key = kv.first.Scalar();
        if (out.contains(key))
          fail(ErrorCode::schema_error,
               concat("duplicate key '", key, "' in ", path));
        out[key] = yaml_to_tree(kv.second, concat(path, ".", key));
      }
      return out;
    }
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& item : node)
        out.push_back(yaml_to_tree(item, concat(path, "[]")));
      return out;
    }
    case YAML::NodeType::Scalar:
      return json(node.Scalar());
    case YAML::NodeType::Null:
      return json(nullptr);
    default:
      fail(ErrorCode::schema_error, concat("unsupported node at ", path));
  }
}

void line_column(const std::string& text, std::size_t byte, int& line,
                 int& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

json parse_tree(const std::string& text, const std::string& origin) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      int line = 1, col = 1;
      line_column(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
      fail(ErrorCode::parse_error,
           concat(origin, ":", line, ":", col, ": ", e.what()));
    }
  }
  try {
    const YAML::Node root = YAML::Load(text);
    if (!root.IsMap())
      fail(ErrorCode::schema_error,
           concat(origin, ": top level must be a key-value table"));
    return yaml_to_tree(root, "config");
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::parse_error, concat(origin, ":", e.mark.line + 1, ":",
                                        e.mark.column + 1, ": ", e.msg));
  }
}

// ---------------------------------------------------------------------------
// Field access with unknown-key detection.

const json* find_key(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_key(const json& obj, const std::string& key,
                        const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v)
    fail(ErrorCode::schema_error,
         concat("missing key '", key, "' in ", where));
  return *v;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    fail(ErrorCode::schema_error, concat(where, " must be a key-value table"));
  for (const auto& kv : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return kv.key() == a;
        }) == allowed.end())
      fail(ErrorCode::schema_error,
           concat("unknown key '", kv.key(), "' in ", where));
  }
}

// ---------------------------------------------------------------------------
// Quantities. A value is either a bare number (already in engine units) or
// a string "NUMBER UNIT". Frequency-like units are cyclic and convert to
// angular rad/s.

enum class Dim {
  length,
  voltage,
  frequency,
  pressure,
  charge,
  mass,
  temperature,
  power,
  dimensionless,
};

struct UnitEntry {
  const char* name;
  double factor;
};

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::length: return "length";
    case Dim::voltage: return "voltage";
    case Dim::frequency: return "frequency";
    case Dim::pressure: return "pressure";
    case Dim::charge: return "charge";
    case Dim::mass: return "mass";
    case Dim::temperature: return "temperature";
    case Dim::power: return "power";
    case Dim::dimensionless: return "dimensionless";
  }
  return "?";
}

// Engine-unit suffix used when re-emitting configs.
const char* dim_suffix(Dim d) {
  switch (d) {
    case Dim::length: return " m";
    case Dim::voltage: return " V";
    case Dim::frequency: return " rad/s";
    case Dim::pressure: return " Pa";
    case Dim::charge: return " C";
    case Dim::mass: return " kg";
    case Dim::temperature: return " K";
    case Dim::power: return " W";
    case Dim::dimensionless: return "";
  }
  return "";
}

const std::vector<UnitEntry>& unit_table(Dim d) {
  static const std::vector<UnitEntry> length = {
      {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
  static const std::vector<UnitEntry> voltage = {
      {"V", 1.0}, {"mV", 1e-3}, {"kV", 1e3}};
  static const std::vector<UnitEntry> frequency = {
      {"rad/s", 1.0},
      {"Hz", units::two_pi},
      {"nHz", units::two_pi * 1e-9},
      {"uHz", units::two_pi * 1e-6},
      {"mHz", units::two_pi * 1e-3},
      {"kHz", units::two_pi * 1e3},
      {"MHz", units::two_pi * 1e6},
      {"GHz", units::two_pi * 1e9}};
  static const std::vector<UnitEntry> pressure = {
      {"Pa", 1.0}, {"mbar", units::mbar_to_pa}, {"bar", 1e5}};
  static const std::vector<UnitEntry> charge = {{"C", 1.0},
                                                {"e", units::e_charge}};
  static const std::vector<UnitEntry> mass = {
      {"kg", 1.0}, {"g", 1e-3}, {"amu", 1.66053906660e-27}};
  static const std::vector<UnitEntry> temperature = {{"K", 1.0}};
  static const std::vector<UnitEntry> power = {
      {"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}, {"pW", 1e-12}};
  static const std::vector<UnitEntry> none = {};
  switch (d) {
    case Dim::length: return length;
    case Dim::voltage: return voltage;
    case Dim::frequency: return frequency;
    case Dim::pressure: return pressure;
    case Dim::charge: return charge;
    case Dim::mass: return mass;
    case Dim::temperature: return temperature;
    case Dim::power: return power;
    case Dim::dimensionless: return none;
  }
  return none;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double read_quantity(const json& v, Dim dim, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string())
    fail(ErrorCode::schema_error,
         concat(where, " must be a number or a 'number unit' string"));
  const std::string s = trimmed(v.get<std::string>());
  const char* begin = s.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin)
    fail(ErrorCode::schema_error,
         concat(where, ": cannot read a number from '", s, "'"));
  const std::string unit = trimmed(std::string(end));
  if (unit.empty()) return value;
  for (const UnitEntry& u : unit_table(dim))
    if (unit == u.name) return value * u.factor;
  fail(ErrorCode::unit_error, concat(where, ": unit '", unit, "' is not a ",
                                     dim_name(dim), " unit"));
}

std::array<double, 3> read_vec3(const json& v, Dim dim,
                                const std::string& where) {
  if (!v.is_array() || v.size() != 3)
    fail(ErrorCode::schema_error,
         concat(where, " must be a 3-entry array (x, y, z)"));
  return {read_quantity(v[0], dim, where), read_quantity(v[1], dim, where),
          read_quantity(v[2], dim, where)};
}

long long read_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) {
    const std::string s = trimmed(v.get<std::string>());
    char* end = nullptr;
    const long long value = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() && *end == '\0') return value;
  }
  fail(ErrorCode::schema_error, concat(where, " must be an integer"));
}

std::string read_string(const json& v, const std::string& where) {
  if (!v.is_string())
    fail(ErrorCode::schema_error, concat(where, " must be a string"));
  return v.get<std::string>();
}

bool read_bool(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = trimmed(v.get<std::string>());
    if (s == "true") return true;
    if (s == "false") return false;
  }
  fail(ErrorCode::schema_error, concat(where, " must be true or false"));
}

// ---------------------------------------------------------------------------
// Schema.

Dim sweep_dim(const std::string& parameter, const std::string& where) {
  if (parameter == "particle_charge") return Dim::charge;
  if (parameter == "particle_mass") return Dim::mass;
  if (parameter == "gamma_p") return Dim::frequency;
  if (parameter == "pressure") return Dim::pressure;
  if (parameter == "displacement_power") return Dim::power;
  if (parameter == "ions") return Dim::dimensionless;
  fail(ErrorCode::schema_error,
       concat(where, ": unknown sweep parameter '", parameter, "'"));
}

TaskKind parse_task(const std::string& s, const std::string& where) {
  if (s == "frequencies") return TaskKind::frequencies;
  if (s == "equilibria") return TaskKind::equilibria;
  if (s == "couplings") return TaskKind::couplings;
  if (s == "steady-state") return TaskKind::steady_state;
  if (s == "floquet") return TaskKind::floquet;
  if (s == "n-ion-sweep") return TaskKind::n_ion_sweep;
  fail(ErrorCode::schema_error, concat(where, ": unknown task '", s, "'"));
}

Axis parse_axis(const std::string& s, const std::string& where) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  fail(ErrorCode::schema_error, concat(where, ": axis must be x, y or z"));
}

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorCode::schema_error, concat(what, " must be positive"));
}

SystemSpec read_system(const json& root) {
  SystemSpec sys;

  const json& trap = require_key(root, "trap", "config");
  check_keys(trap, "trap",
             {"electrode_distance", "geometric_efficiency", "dc_voltage",
              "slow_voltage", "fast_voltage", "slow_frequency",
              "fast_frequency"});
  sys.trap.d = read_vec3(require_key(trap, "electrode_distance", "trap"),
                         Dim::length, "trap.electrode_distance");
  sys.trap.alpha =
      read_vec3(require_key(trap, "geometric_efficiency", "trap"),
                Dim::dimensionless, "trap.geometric_efficiency");
  sys.trap.U0 = read_vec3(require_key(trap, "dc_voltage", "trap"),
                          Dim::voltage, "trap.dc_voltage");
  sys.trap.Us = read_vec3(require_key(trap, "slow_voltage", "trap"),
                          Dim::voltage, "trap.slow_voltage");
  sys.trap.Uf = read_vec3(require_key(trap, "fast_voltage", "trap"),
                          Dim::voltage, "trap.fast_voltage");
  sys.trap.omega_s = read_quantity(require_key(trap, "slow_frequency", "trap"),
                                   Dim::frequency, "trap.slow_frequency");
  sys.trap.omega_f = read_quantity(require_key(trap, "fast_frequency", "trap"),
                                   Dim::frequency, "trap.fast_frequency");
  check_positive(sys.trap.omega_s, "trap.slow_frequency");
  check_positive(sys.trap.omega_f, "trap.fast_frequency");
  for (double d : sys.trap.d) check_positive(d, "trap.electrode_distance");

  const json& particle = require_key(root, "particle", "config");
  check_keys(particle, "particle", {"mass", "charge", "radius",
                                    "permittivity"});
  sys.particle.mass = read_quantity(require_key(particle, "mass", "particle"),
                                    Dim::mass, "particle.mass");
  sys.particle.charge =
      read_quantity(require_key(particle, "charge", "particle"), Dim::charge,
                    "particle.charge");
  sys.particle.radius =
      read_quantity(require_key(particle, "radius", "particle"), Dim::length,
                    "particle.radius");
  sys.particle.eps_r = 2.11;
  if (const json* v = find_key(particle, "permittivity"))
    sys.particle.eps_r =
        read_quantity(*v, Dim::dimensionless, "particle.permittivity");
  check_positive(sys.particle.mass, "particle.mass");
  check_positive(sys.particle.radius, "particle.radius");
  if (sys.particle.charge == 0.0)
    fail(ErrorCode::schema_error, "particle.charge must be nonzero");

  const json& ion = require_key(root, "ion", "config");
  check_keys(ion, "ion", {"mass", "charge"});
  sys.ion.mass = read_quantity(require_key(ion, "mass", "ion"), Dim::mass,
                               "ion.mass");
  sys.ion.charge = read_quantity(require_key(ion, "charge", "ion"),
                                 Dim::charge, "ion.charge");
  sys.ion.radius = 0.0;
  sys.ion.eps_r = 1.0;
  check_positive(sys.ion.mass, "ion.mass");
  if (sys.ion.charge == 0.0)
    fail(ErrorCode::schema_error, "ion.charge must be nonzero");

  const json& gas = require_key(root, "gas", "config");
  check_keys(gas, "gas", {"temperature", "pressure", "molecule_mass"});
  if (const json* v = find_key(gas, "temperature"))
    sys.gas.temperature = read_quantity(*v, Dim::temperature,
                                        "gas.temperature");
  sys.gas.pressure = read_quantity(require_key(gas, "pressure", "gas"),
                                   Dim::pressure, "gas.pressure");
  if (const json* v = find_key(gas, "molecule_mass"))
    sys.gas.molecule_mass = read_quantity(*v, Dim::mass, "gas.molecule_mass");
  check_positive(sys.gas.temperature, "gas.temperature");
  if (sys.gas.pressure < 0.0)
    fail(ErrorCode::schema_error, "gas.pressure cannot be negative");

  if (const json* fb = find_key(root, "feedback")) {
    check_keys(*fb, "feedback",
               {"damping", "conversion", "wavelength", "geometry_factor"});
    if (const json* v = find_key(*fb, "damping"))
      sys.feedback.gamma_fb =
          read_quantity(*v, Dim::frequency, "feedback.damping");
    if (const json* v = find_key(*fb, "conversion"))
      sys.feedback.c_fb =
          read_quantity(*v, Dim::dimensionless, "feedback.conversion");
    if (const json* v = find_key(*fb, "wavelength"))
      sys.feedback.wavelength =
          read_quantity(*v, Dim::length, "feedback.wavelength");
    if (const json* v = find_key(*fb, "geometry_factor"))
      sys.feedback.zeta =
          read_quantity(*v, Dim::dimensionless, "feedback.geometry_factor");
  }

  const json& dop = require_key(root, "doppler", "config");
  check_keys(dop, "doppler", {"damping", "heating_power"});
  sys.doppler.gamma_dop = read_quantity(
      require_key(dop, "damping", "doppler"), Dim::frequency,
      "doppler.damping");
  sys.doppler.edot =
      read_quantity(require_key(dop, "heating_power", "doppler"), Dim::power,
                    "doppler.heating_power");

  if (const json* noise = find_key(root, "noise")) {
    check_keys(*noise, "noise", {"displacement_power"});
    if (const json* v = find_key(*noise, "displacement_power"))
      sys.edot_td = read_quantity(*v, Dim::power, "noise.displacement_power");
  }

  if (const json* v = find_key(root, "ions")) {
    const long long n = read_int(*v, "ions");
    if (n < 1 || n > 64)
      fail(ErrorCode::schema_error, "ions must be between 1 and 64");
    sys.n_ions = static_cast<int>(n);
  }
  return sys;
}

SweepSpec read_sweep(const json& v, const std::string& where) {
  check_keys(v, where, {"parameter", "scale", "from", "to", "points"});
  SweepSpec sw;
  sw.parameter = read_string(require_key(v, "parameter", where),
                             concat(where, ".parameter"));
  const Dim dim = sweep_dim(sw.parameter, where);
  if (const json* s = find_key(v, "scale")) {
    const std::string scale = read_string(*s, concat(where, ".scale"));
    if (scale == "log")
      sw.log_scale = true;
    else if (scale != "linear")
      fail(ErrorCode::schema_error,
           concat(where, ": scale must be log or linear"));
  }
  sw.from = read_quantity(require_key(v, "from", where), dim,
                          concat(where, ".from"));
  sw.to = read_quantity(require_key(v, "to", where), dim,
                        concat(where, ".to"));
  sw.points = static_cast<int>(read_int(require_key(v, "points", where),
                                        concat(where, ".points")));
  if (!std::isfinite(sw.from) || !std::isfinite(sw.to) || sw.from > sw.to)
    fail(ErrorCode::schema_error,
         concat(where, ": bounds must be finite with from <= to"));
  if (sw.points < 1)
    fail(ErrorCode::schema_error, concat(where, ": points must be >= 1"));
  if (sw.log_scale && !(sw.from > 0.0))
    fail(ErrorCode::schema_error,
         concat(where, ": log sweeps need positive bounds"));
  if (sw.parameter == "ions" &&
      (sw.from != std::floor(sw.from) || sw.to != std::floor(sw.to) ||
       sw.from < 1.0))
    fail(ErrorCode::schema_error,
         concat(where, ": ion counts must be integers >= 1"));
  return sw;
}

std::vector<Scenario> read_scenarios(const json& root) {
  std::vector<Scenario> out;
  const json* list = find_key(root, "scenarios");
  if (!list) return out;
  if (!list->is_array())
    fail(ErrorCode::schema_error, "scenarios must be a list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& v = (*list)[i];
    const std::string where = concat("scenarios[", i, "]");
    check_keys(v, where,
               {"name", "task", "output", "seed", "sweep", "axis", "gamma_p",
                "displacement_power", "restarts", "screen_drive"});
    Scenario sc;
    sc.name = read_string(require_key(v, "name", where),
                          concat(where, ".name"));
    if (sc.name.empty() || !names.insert(sc.name).second)
      fail(ErrorCode::schema_error,
           concat(where, ": scenario names must be unique and nonempty"));
    sc.task = parse_task(
        read_string(require_key(v, "task", where), concat(where, ".task")),
        where);
    sc.output = sc.name + ".csv";
    if (const json* o = find_key(v, "output"))
      sc.output = read_string(*o, concat(where, ".output"));
    if (const json* s = find_key(v, "seed"))
      sc.seed = static_cast<std::uint64_t>(read_int(*s, concat(where, ".seed")));
    if (const json* s = find_key(v, "sweep"))
      sc.sweep = read_sweep(*s, concat(where, ".sweep"));
    if (const json* a = find_key(v, "axis"))
      sc.axis = parse_axis(read_string(*a, concat(where, ".axis")), where);
    if (const json* g = find_key(v, "gamma_p"))
      sc.gamma_p = read_quantity(*g, Dim::frequency, concat(where, ".gamma_p"));
    if (const json* e = find_key(v, "displacement_power"))
      sc.edot_td = read_quantity(*e, Dim::power,
                                 concat(where, ".displacement_power"));
    if (const json* r = find_key(v, "restarts")) {
      const long long n = read_int(*r, concat(where, ".restarts"));
      if (n < 0)
        fail(ErrorCode::schema_error,
             concat(where, ": restarts cannot be negative"));
      sc.restarts = static_cast<int>(n);
    }
    if (const json* s = find_key(v, "screen_drive"))
      sc.screen_drive = read_bool(*s, concat(where, ".screen_drive"));
    if (sc.task == TaskKind::n_ion_sweep) {
      if (!sc.sweep || sc.sweep->parameter != "ions")
        fail(ErrorCode::schema_error,
             concat(where, ": n-ion-sweep needs a sweep over ions"));
    } else if (sc.sweep && sc.sweep->parameter == "ions") {
      fail(ErrorCode::schema_error,
           concat(where, ": only n-ion-sweep sweeps the ion count"));
    }
    out.push_back(std::move(sc));
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json vec3_json(const std::array<double, 3>& v) {
  return json::array({v[0], v[1], v[2]});
}

}  // namespace

const char* task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::frequencies: return "frequencies";
    case TaskKind::equilibria: return "equilibria";
    case TaskKind::couplings: return "couplings";
    case TaskKind::steady_state: return "steady-state";
    case TaskKind::floquet: return "floquet";
    case TaskKind::n_ion_sweep: return "n-ion-sweep";
  }
  return "?";
}

Config parse_config(const std::string& text, const std::string& origin) {
  const json root = parse_tree(text, origin);
  check_keys(root, "config", {"trap", "particle", "ion", "gas", "feedback",
                              "doppler", "noise", "ions", "scenarios"});
  Config cfg;
  cfg.system = read_system(root);
  cfg.scenarios = read_scenarios(root);
  cfg.digest = hex64(fnv1a(canonical_json(cfg)));
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorCode::io_error, concat("cannot open config file ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string canonical_json(const Config& cfg) {
  const SystemSpec& s = cfg.system;
  json root;
  root["system"]["trap"] = {
      {"electrode_distance", vec3_json(s.trap.d)},
      {"geometric_efficiency", vec3_json(s.trap.alpha)},
      {"dc_voltage", vec3_json(s.trap.U0)},
      {"slow_voltage", vec3_json(s.trap.Us)},
      {"fast_voltage", vec3_json(s.trap.Uf)},
      {"slow_frequency", s.trap.omega_s},
      {"fast_frequency", s.trap.omega_f}};
  root["system"]["particle"] = {{"mass", s.particle.mass},
                                {"charge", s.particle.charge},
                                {"radius", s.particle.radius},
                                {"permittivity", s.particle.eps_r}};
  root["system"]["ion"] = {{"mass", s.ion.mass}, {"charge", s.ion.charge}};
  root["system"]["gas"] = {{"temperature", s.gas.temperature},
                           {"pressure", s.gas.pressure},
                           {"molecule_mass", s.gas.molecule_mass}};
  root["system"]["feedback"] = {{"damping", s.feedback.gamma_fb},
                                {"conversion", s.feedback.c_fb},
                                {"wavelength", s.feedback.wavelength},
                                {"geometry_factor", s.feedback.zeta}};
  root["system"]["doppler"] = {{"damping", s.doppler.gamma_dop},
                               {"heating_power", s.doppler.edot}};
  root["system"]["noise"] = {{"displacement_power", s.edot_td}};
  root["system"]["ions"] = s.n_ions;
  json scenarios = json::array();
  for (const Scenario& sc : cfg.scenarios) {
    json v = {{"name", sc.name},
              {"task", task_name(sc.task)},
              {"output", sc.output},
              {"seed", sc.seed},
              {"axis", axis_name(sc.axis)}};
    if (sc.sweep) {
      v["sweep"] = {{"parameter", sc.sweep->parameter},
                    {"scale", sc.sweep->log_scale ? "log" : "linear"},
                    {"from", sc.sweep->from},
                    {"to", sc.sweep->to},
                    {"points", sc.sweep->points}};
    }
    if (sc.gamma_p >= 0.0) v["gamma_p"] = sc.gamma_p;
    if (sc.edot_td) v["displacement_power"] = *sc.edot_td;
    if (sc.restarts > 0) v["restarts"] = sc.restarts;
    if (sc.screen_drive) v["screen_drive"] = true;
    scenarios.push_back(std::move(v));
  }
  root["scenarios"] = std::move(scenarios);
  return root.dump();
}

std::string emit_config(const Config& cfg) {
  const SystemSpec& s = cfg.system;
  std::ostringstream out;
  const auto q = [](double v, Dim d) {
    return fmt(v) + dim_suffix(d);
  };
  const auto vec = [&](const std::array<double, 3>& v, Dim d) {
    return concat("[", q(v[0], d), ", ", q(v[1], d), ", ", q(v[2], d), "]");
  };
  out << "trap:\n";
  out << "  electrode_distance: " << vec(s.trap.d, Dim::length) << "\n";
  out << "  geometric_efficiency: " << vec(s.trap.alpha, Dim::dimensionless)
      << "\n";
  out << "  dc_voltage: " << vec(s.trap.U0, Dim::voltage) << "\n";
  out << "  slow_voltage: " << vec(s.trap.Us, Dim::voltage) << "\n";
  out << "  fast_voltage: " << vec(s.trap.Uf, Dim::voltage) << "\n";
  out << "  slow_frequency: " << q(s.trap.omega_s, Dim::frequency) << "\n";
  out << "  fast_frequency: " << q(s.trap.omega_f, Dim::frequency) << "\n";
  out << "particle:\n";
  out << "  mass: " << q(s.particle.mass, Dim::mass) << "\n";
  out << "  charge: " << q(s.particle.charge, Dim::charge) << "\n";
  out << "  radius: " << q(s.particle.radius, Dim::length) << "\n";
  out << "  permittivity: " << fmt(s.particle.eps_r) << "\n";
  out << "ion:\n";
  out << "  mass: " << q(s.ion.mass, Dim::mass) << "\n";
  out << "  charge: " << q(s.ion.charge, Dim::charge) << "\n";
  out << "gas:\n";
  out << "  temperature: " << q(s.gas.temperature, Dim::temperature) << "\n";
  out << "  pressure: " << q(s.gas.pressure, Dim::pressure) << "\n";
  out << "  molecule_mass: " << q(s.gas.molecule_mass, Dim::mass) << "\n";
  out << "feedback:\n";
  out << "  damping: " << q(s.feedback.gamma_fb, Dim::frequency) << "\n";
  out << "  conversion: " << fmt(s.feedback.c_fb) << "\n";
  out << "  wavelength: " << q(s.feedback.wavelength, Dim::length) << "\n";
  out << "  geometry_factor: " << fmt(s.feedback.zeta) << "\n";
  out << "doppler:\n";
  out << "  damping: " << q(s.doppler.gamma_dop, Dim::frequency) << "\n";
  out << "  heating_power: " << q(s.doppler.edot, Dim::power) << "\n";
  out << "noise:\n";
  out << "  displacement_power: " << q(s.edot_td, Dim::power) << "\n";
  out << "ions: " << s.n_ions << "\n";
  if (!cfg.scenarios.empty()) {
    out << "scenarios:\n";
    for (const Scenario& sc : cfg.scenarios) {
      out << "  - name: " << sc.name << "\n";
      out << "    task: " << task_name(sc.task) << "\n";
      out << "    output: " << sc.output << "\n";
      out << "    seed: " << sc.seed << "\n";
      out << "    axis: " << axis_name(sc.axis) << "\n";
      if (sc.sweep) {
        const Dim dim = sweep_dim(sc.sweep->parameter, "sweep");
        out << "    sweep:\n";
        out << "      parameter: " << sc.sweep->parameter << "\n";
        out << "      scale: " << (sc.sweep->log_scale ? "log" : "linear")
            << "\n";
        out << "      from: " << q(sc.sweep->from, dim) << "\n";
        out << "      to: " << q(sc.sweep->to, dim) << "\n";
        out << "      points: " << sc.sweep->points << "\n";
      }
      if (sc.gamma_p >= 0.0)
        out << "    gamma_p: " << q(sc.gamma_p, Dim::frequency) << "\n";
      if (sc.edot_td)
        out << "    displacement_power: " << q(*sc.edot_td, Dim::power)
            << "\n";
      if (sc.restarts > 0) out << "    restarts: " << sc.restarts << "\n";
      if (sc.screen_drive) out << "    screen_drive: true\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Bundled presets. The reference operating point plus one preset per
// standard figure-style sweep; the same text is shipped under presets/.

namespace {

const char* kSystemBlock = R"(# Reference operating point: charged silica nanoparticle co-trapped with a
# single calcium ion in the dual-frequency linear trap.
trap:
  electrode_distance: [0.9 mm, 0.9 mm, 1.7 mm]
  geometric_efficiency: [0.93, 0.93, 0.38]
  dc_voltage: [3.2 V, -3.2 V, 56.5 V]
  slow_voltage: [80 V, -80 V, 0 V]
  fast_voltage: [1350 V, -1350 V, 0 V]
  slow_frequency: 7 kHz
  fast_frequency: 17.5 MHz
particle:
  mass: 2e-17 kg
  charge: 1.2e-16 C    # 750 elementary charges at the quoted rounding
  radius: 134 nm
  permittivity: 2.11
ion:
  mass: 6.4e-26 kg
  charge: 1.6e-19 C
gas:
  temperature: 300 K
  # Calibrated so the gas damping comes out at the quoted 2pi x 44.5 nHz;
  # the rounded headline pressure 7e-11 mbar would give 31 nHz instead.
  pressure: 9.98433e-9 Pa
doppler:
  damping: 10 kHz
  heating_power: 3.8e-22 W
noise:
  displacement_power: 2.8e-26 W
ions: 1
)";

struct Preset {
  const char* name;
  const char* scenarios;
};

const Preset kPresets[] = {
    {"table1", R"(scenarios:
  - name: frequencies
    task: frequencies
  - name: equilibrium
    task: equilibria
    screen_drive: true
  - name: couplings
    task: couplings
  - name: cooling
    task: steady-state
  - name: micromotion
    task: floquet
    axis: x
)"},
    {"fig2_sweep", R"(scenarios:
  - name: charge_sweep
    task: couplings
    sweep:
      parameter: particle_charge
      scale: log
      from: 3.84e-17 C    # 240 elementary charges, above the drive onset
      to: 1.2e-15 C
      points: 25
  - name: mass_sweep
    task: couplings
    sweep:
      parameter: particle_mass
      scale: log
      from: 2e-18 kg
      to: 6e-17 kg        # below the heavy-mass drive onset
      points: 25
)"},
    {"fig3_sweep", R"(scenarios:
  - name: with_displacement_noise
    task: steady-state
    sweep:
      parameter: gamma_p
      scale: log
      from: 1e-8 Hz
      to: 1e3 Hz
      points: 50
  - name: without_displacement_noise
    task: steady-state
    displacement_power: 0 W
    sweep:
      parameter: gamma_p
      scale: log
      from: 1e-8 Hz
      to: 1e3 Hz
      points: 50
)"},
    {"fig4_micromotion", R"(scenarios:
  - name: micromotion_vs_damping
    task: floquet
    axis: x
    sweep:
      parameter: gamma_p
      scale: log
      from: 1e-8 Hz
      to: 1e3 Hz
      points: 12
)"},
    {"fig5_nion", R"(scenarios:
  - name: ion_number_sweep
    task: n-ion-sweep
    axis: z
    displacement_power: 0 W
    seed: 1
    sweep:
      parameter: ions
      from: 1
      to: 12
      points: 12
)"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const Preset& p : kPresets) out.push_back(p.name);
  return out;
}

std::string preset_text(const std::string& name) {
  for (const Preset& p : kPresets)
    if (name == p.name) return std::string(kSystemBlock) + p.scenarios;
  fail(ErrorCode::unknown_preset,
       concat("no bundled preset named '", name, "'"));
}

Config preset_config(const std::string& name) {
  return parse_config(preset_text(name), concat("preset:", name));
}

}  // namespace cotrap
