#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "table.hpp"
#include "units.hpp"

using namespace cotrap;
using cotrap::testing::table_ion;
using cotrap::testing::table_particle;
using cotrap::testing::table_trap;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

ErrorCode thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

// Smallest document the schema accepts; tests splice scenario blocks or
// value overrides onto this.
std::string base_yaml() {
  return R"(trap:
  electrode_distance: [0.9 mm, 0.9 mm, 1.7 mm]
  geometric_efficiency: [0.93, 0.93, 0.38]
  dc_voltage: [3.2 V, -3.2 V, 56.5 V]
  slow_voltage: [80 V, -80 V, 0 V]
  fast_voltage: [1350 V, -1350 V, 0 V]
  slow_frequency: 7 kHz
  fast_frequency: 17.5 MHz
particle:
  mass: 2e-17 kg
  charge: 750 e
  radius: 134 nm
ion:
  mass: 6.4e-26 kg
  charge: 1 e
gas:
  pressure: 7e-11 mbar
doppler:
  damping: 10 kHz
  heating_power: 3.8e-22 W
)";
}

}  // namespace

TEST_CASE("quantities convert to engine units") {
  const Config cfg = parse_config(base_yaml(), "base");
  const SystemSpec& s = cfg.system;

  // Lengths in m, voltages in V, cyclic frequencies in angular rad/s.
  CHECK(s.trap.d[0] == doctest::Approx(0.9e-3).epsilon(1e-15));
  CHECK(s.trap.d[2] == doctest::Approx(1.7e-3).epsilon(1e-15));
  CHECK(s.trap.alpha[2] == doctest::Approx(0.38).epsilon(1e-15));
  CHECK(s.trap.U0[1] == doctest::Approx(-3.2).epsilon(1e-15));
  CHECK(s.trap.Uf[0] == doctest::Approx(1350.0).epsilon(1e-15));
  CHECK(rel_err(s.trap.omega_s, units::two_pi * 7e3) < 1e-15);
  CHECK(rel_err(s.trap.omega_f, units::two_pi * 17.5e6) < 1e-15);

  // "750 e" scales by the elementary charge; "134 nm" lands in meters.
  CHECK(rel_err(s.particle.charge, 750.0 * units::e_charge) < 1e-15);
  CHECK(rel_err(s.particle.radius, 1.34e-7) < 1e-15);
  CHECK(s.particle.mass == doctest::Approx(2e-17).epsilon(1e-15));
  CHECK(rel_err(s.ion.charge, units::e_charge) < 1e-15);

  // mbar to Pa is a factor 100.
  CHECK(rel_err(s.gas.pressure, 7e-9) < 1e-15);

  // Defaults fill in when keys are omitted.
  CHECK(s.particle.eps_r == doctest::Approx(2.11));
  CHECK(s.gas.temperature == doctest::Approx(300.0));
  CHECK(s.gas.molecule_mass == doctest::Approx(units::gas_molecule_mass));
  CHECK(s.feedback.gamma_fb == 0.0);
  CHECK(s.edot_td == 0.0);
  CHECK(s.n_ions == 1);
  CHECK(cfg.scenarios.empty());

  CHECK(rel_err(s.doppler.gamma_dop, units::two_pi * 1e4) < 1e-15);
  CHECK(s.doppler.edot == doctest::Approx(3.8e-22).epsilon(1e-15));
}

TEST_CASE("unit suffix coverage") {
  const auto one = [](const std::string& body, double want) {
    std::string text = base_yaml();
    text += "noise:\n  displacement_power: " + body + "\n";
    const Config cfg = parse_config(text, "unit");
    CHECK(rel_err(cfg.system.edot_td, want) < 1e-15);
  };
  one("2.8e-26 W", 2.8e-26);
  one("1 mW", 1e-3);
  one("5 uW", 5e-6);
  one("12 nW", 12e-9);
  one("3 pW", 3e-12);
  // A bare number is already in engine units.
  one("4.2e-25", 4.2e-25);

  // Frequencies: every cyclic suffix maps through 2 pi.
  const auto freq = [](const std::string& body, double want) {
    std::string text = base_yaml();
    text += "feedback:\n  damping: " + body + "\n";
    const Config cfg = parse_config(text, "unit");
    CHECK(rel_err(cfg.system.feedback.gamma_fb, want) < 1e-15);
  };
  freq("44.5 nHz", units::two_pi * 44.5e-9);
  freq("3 uHz", units::two_pi * 3e-6);
  freq("2 mHz", units::two_pi * 2e-3);
  freq("1 Hz", units::two_pi);
  freq("1 kHz", units::two_pi * 1e3);
  freq("1 MHz", units::two_pi * 1e6);
  freq("0.001 GHz", units::two_pi * 1e6);
  // "rad/s" marks an already-angular value.
  freq("6.283 rad/s", 6.283);
}

TEST_CASE("wrong or unknown units are rejected") {
  // A frequency unit on a pressure field names the expected dimension.
  std::string text = base_yaml();
  text.replace(text.find("7e-11 mbar"), 10, "7e-11 kHz");
  CHECK(thrown_code([&] { parse_config(text, "t"); }) ==
        ErrorCode::unit_error);

  std::string text2 = base_yaml();
  text2.replace(text2.find("134 nm"), 6, "134 furlongs");
  CHECK(thrown_code([&] { parse_config(text2, "t"); }) ==
        ErrorCode::unit_error);

  // No number at all in the scalar.
  std::string text3 = base_yaml();
  text3.replace(text3.find("134 nm"), 6, "tiny");
  CHECK(thrown_code([&] { parse_config(text3, "t"); }) ==
        ErrorCode::schema_error);
}

TEST_CASE("schema violations carry schema_error") {
  // Missing required key.
  std::string no_ion = base_yaml();
  no_ion.replace(no_ion.find("ion:\n  mass: 6.4e-26 kg\n  charge: 1 e\n"), 40,
                 "");
  CHECK(thrown_code([&] { parse_config(no_ion, "t"); }) ==
        ErrorCode::schema_error);

  // Unknown key at top level and inside a block.
  CHECK(thrown_code([&] {
          parse_config(base_yaml() + "banana: 3\n", "t");
        }) == ErrorCode::schema_error);
  std::string bad_trap = base_yaml();
  bad_trap.replace(bad_trap.find("slow_frequency"), 14, "slow_freq_typo");
  CHECK(thrown_code([&] { parse_config(bad_trap, "t"); }) ==
        ErrorCode::schema_error);

  // Nonpositive required physical values.
  std::string zero_mass = base_yaml();
  zero_mass.replace(zero_mass.find("2e-17 kg"), 8, "0 kg");
  CHECK(thrown_code([&] { parse_config(zero_mass, "t"); }) ==
        ErrorCode::schema_error);
  std::string zero_q = base_yaml();
  zero_q.replace(zero_q.find("750 e"), 5, "0 e");
  CHECK(thrown_code([&] { parse_config(zero_q, "t"); }) ==
        ErrorCode::schema_error);

  // Ion count bounds.
  CHECK(thrown_code([&] { parse_config(base_yaml() + "ions: 0\n", "t"); }) ==
        ErrorCode::schema_error);
  CHECK(thrown_code([&] { parse_config(base_yaml() + "ions: 65\n", "t"); }) ==
        ErrorCode::schema_error);
  CHECK(parse_config(base_yaml() + "ions: 12\n", "t").system.n_ions == 12);
}

TEST_CASE("scenario parsing, defaults and validation") {
  std::string text = base_yaml() + R"(scenarios:
  - name: freqs
    task: frequencies
  - name: cool
    task: steady-state
    output: cooling_curve.csv
    seed: 42
    axis: z
    gamma_p: 1e-6 Hz
    displacement_power: 0 W
  - name: micromotion
    task: floquet
    axis: x
    screen_drive: true
    restarts: 12
)";
  const Config cfg = parse_config(text, "t");
  REQUIRE(cfg.scenarios.size() == 3);

  const Scenario& a = cfg.scenarios[0];
  CHECK(a.name == "freqs");
  CHECK(a.task == TaskKind::frequencies);
  CHECK(a.output == "freqs.csv");  // defaults to the scenario name
  CHECK(a.seed == 1);
  CHECK(a.axis == Axis::x);
  CHECK(a.gamma_p < 0.0);
  CHECK(!a.edot_td);
  CHECK(a.restarts == 0);
  CHECK(!a.screen_drive);

  const Scenario& b = cfg.scenarios[1];
  CHECK(b.task == TaskKind::steady_state);
  CHECK(b.output == "cooling_curve.csv");
  CHECK(b.seed == 42);
  CHECK(b.axis == Axis::z);
  CHECK(rel_err(b.gamma_p, units::two_pi * 1e-6) < 1e-15);
  REQUIRE(b.edot_td.has_value());
  CHECK(*b.edot_td == 0.0);  // explicitly zeroed, distinct from unset

  const Scenario& c = cfg.scenarios[2];
  CHECK(c.task == TaskKind::floquet);
  CHECK(c.screen_drive);
  CHECK(c.restarts == 12);

  // Duplicate names are rejected.
  std::string dup = base_yaml() + R"(scenarios:
  - name: same
    task: frequencies
  - name: same
    task: couplings
)";
  CHECK(thrown_code([&] { parse_config(dup, "t"); }) ==
        ErrorCode::schema_error);

  // Unknown task name.
  std::string bad_task = base_yaml() + R"(scenarios:
  - name: s
    task: teleport
)";
  CHECK(thrown_code([&] { parse_config(bad_task, "t"); }) ==
        ErrorCode::schema_error);

  // Mistyped field values map to schema_error, not a raw library throw.
  std::string bad_axis = base_yaml() + R"(scenarios:
  - name: s
    task: floquet
    axis: w
)";
  CHECK(thrown_code([&] { parse_config(bad_axis, "t"); }) ==
        ErrorCode::schema_error);
}

TEST_CASE("sweep validation") {
  const auto with_sweep = [&](const std::string& sweep) {
    return base_yaml() + "scenarios:\n  - name: s\n    task: steady-state\n" +
           "    sweep:\n" + sweep;
  };
  const Config ok = parse_config(with_sweep(R"(      parameter: gamma_p
      scale: log
      from: 1e-8 Hz
      to: 1e3 Hz
      points: 50
)"),
                                 "t");
  REQUIRE(ok.scenarios[0].sweep.has_value());
  const SweepSpec& sw = *ok.scenarios[0].sweep;
  CHECK(sw.parameter == "gamma_p");
  CHECK(sw.log_scale);
  CHECK(rel_err(sw.from, units::two_pi * 1e-8) < 1e-15);
  CHECK(rel_err(sw.to, units::two_pi * 1e3) < 1e-15);
  CHECK(sw.points == 50);

  // Reversed bounds.
  CHECK(thrown_code([&] {
          parse_config(with_sweep("      parameter: gamma_p\n      from: 10 "
                                  "Hz\n      to: 1 Hz\n      points: 5\n"),
                       "t");
        }) == ErrorCode::schema_error);
  // Log scale needs a positive lower bound.
  CHECK(thrown_code([&] {
          parse_config(with_sweep("      parameter: gamma_p\n      scale: "
                                  "log\n      from: 0 Hz\n      to: 1 Hz\n  "
                                  "    points: 5\n"),
                       "t");
        }) == ErrorCode::schema_error);
  // points >= 1.
  CHECK(thrown_code([&] {
          parse_config(with_sweep("      parameter: gamma_p\n      from: 1 "
                                  "Hz\n      to: 2 Hz\n      points: 0\n"),
                       "t");
        }) == ErrorCode::schema_error);
  // Unknown parameter.
  CHECK(thrown_code([&] {
          parse_config(with_sweep("      parameter: warp\n      from: 1\n    "
                                  "  to: 2\n      points: 5\n"),
                       "t");
        }) == ErrorCode::schema_error);
  // Fractional ion counts.
  const auto nion = [&](const std::string& sweep) {
    return base_yaml() + "scenarios:\n  - name: s\n    task: n-ion-sweep\n" +
           "    sweep:\n" + sweep;
  };
  CHECK(thrown_code([&] {
          parse_config(nion("      parameter: ions\n      from: 1.5\n      "
                            "to: 3\n      points: 2\n"),
                       "t");
        }) == ErrorCode::schema_error);
  const Config ions_ok = parse_config(
      nion("      parameter: ions\n      from: 1\n      to: 12\n      "
           "points: 12\n"),
      "t");
  CHECK(ions_ok.scenarios[0].sweep->to == 12.0);

  // The ion-count parameter pairs only with the n-ion-sweep task, which in
  // turn cannot run without a sweep.
  std::string mismatched = base_yaml() + R"(scenarios:
  - name: s
    task: n-ion-sweep
    sweep:
      parameter: gamma_p
      from: 1 Hz
      to: 2 Hz
      points: 2
)";
  CHECK(thrown_code([&] { parse_config(mismatched, "t"); }) ==
        ErrorCode::schema_error);
  CHECK(thrown_code([&] {
          parse_config(with_sweep("      parameter: ions\n      from: 1\n    "
                                  "  to: 3\n      points: 3\n"),
                       "t");
        }) == ErrorCode::schema_error);
  std::string sweepless = base_yaml() + R"(scenarios:
  - name: s
    task: n-ion-sweep
)";
  CHECK(thrown_code([&] { parse_config(sweepless, "t"); }) ==
        ErrorCode::schema_error);
}

TEST_CASE("parse errors carry location, io errors carry path") {
  // Broken YAML: a flow sequence that never closes.
  const std::string bad_yaml = "trap:\n  dc_voltage: [3.2 V, -3.2\n";
  try {
    parse_config(bad_yaml, "conf.yaml");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(std::string(e.what()).find("conf.yaml:") != std::string::npos);
  }

  // Broken JSON (sniffed by the leading brace).
  const std::string bad_json = "{ \"trap\": { \"dc_voltage\": [3.2,, ] } }";
  try {
    parse_config(bad_json, "conf.json");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(std::string(e.what()).find("conf.json:1:") != std::string::npos);
  }

  // Duplicate mapping key.
  const std::string dup_key =
      "trap:\n  electrode_distance: [1 mm, 1 mm, 1 mm]\n"
      "  electrode_distance: [2 mm, 2 mm, 2 mm]\n";
  CHECK(thrown_code([&] { parse_config(dup_key, "t"); }) ==
        ErrorCode::schema_error);

  CHECK(thrown_code([&] { load_config("/nonexistent/nowhere.yaml"); }) ==
        ErrorCode::io_error);
}

TEST_CASE("JSON input normalizes to the same config as YAML") {
  const std::string json_text = R"({
  "trap": {
    "electrode_distance": ["0.9 mm", "0.9 mm", "1.7 mm"],
    "geometric_efficiency": [0.93, 0.93, 0.38],
    "dc_voltage": [3.2, -3.2, 56.5],
    "slow_voltage": [80, -80, 0],
    "fast_voltage": [1350, -1350, 0],
    "slow_frequency": "7 kHz",
    "fast_frequency": "17.5 MHz"
  },
  "particle": {"mass": 2e-17, "charge": "750 e", "radius": "134 nm"},
  "ion": {"mass": 6.4e-26, "charge": "1 e"},
  "gas": {"pressure": "7e-11 mbar"},
  "doppler": {"damping": "10 kHz", "heating_power": 3.8e-22}
})";
  const Config from_json = parse_config(json_text, "j");
  const Config from_yaml = parse_config(base_yaml(), "y");
  CHECK(from_json.digest == from_yaml.digest);
  CHECK(canonical_json(from_json) == canonical_json(from_yaml));
}

TEST_CASE("digest is stable under key reordering and sensitive to values") {
  // Same document with blocks and in-block keys shuffled.
  const std::string reordered = R"(doppler:
  heating_power: 3.8e-22 W
  damping: 10 kHz
gas:
  pressure: 7e-11 mbar
ion:
  charge: 1 e
  mass: 6.4e-26 kg
particle:
  radius: 134 nm
  charge: 750 e
  mass: 2e-17 kg
trap:
  fast_frequency: 17.5 MHz
  slow_frequency: 7 kHz
  fast_voltage: [1350 V, -1350 V, 0 V]
  slow_voltage: [80 V, -80 V, 0 V]
  dc_voltage: [3.2 V, -3.2 V, 56.5 V]
  geometric_efficiency: [0.93, 0.93, 0.38]
  electrode_distance: [0.9 mm, 0.9 mm, 1.7 mm]
)";
  const Config a = parse_config(base_yaml(), "a");
  const Config b = parse_config(reordered, "b");
  CHECK(a.digest == b.digest);
  CHECK(a.digest.size() == 16);
  CHECK(a.digest.find_first_not_of("0123456789abcdef") == std::string::npos);

  // Any value change moves the digest.
  std::string tweaked = base_yaml();
  tweaked.replace(tweaked.find("56.5 V"), 6, "56.6 V");
  CHECK(parse_config(tweaked, "c").digest != a.digest);

  // Scenario lists feed the digest too.
  const std::string with_sc = base_yaml() +
                              "scenarios:\n  - name: s\n    task: "
                              "frequencies\n";
  CHECK(parse_config(with_sc, "d").digest != a.digest);
}

TEST_CASE("emit and reparse reproduces every value") {
  std::string text = base_yaml() + R"(feedback:
  damping: 0.35 Hz
  conversion: 1.57e-6
  wavelength: 780 nm
  geometry_factor: 7
noise:
  displacement_power: 2.8e-26 W
ions: 3
scenarios:
  - name: cool
    task: steady-state
    seed: 9
    axis: z
    gamma_p: 2.5 mHz
    displacement_power: 1e-27 W
    restarts: 4
    screen_drive: true
    sweep:
      parameter: pressure
      scale: log
      from: 1e-11 mbar
      to: 1e-7 mbar
      points: 7
)";
  const Config cfg = parse_config(text, "t");
  const Config back = parse_config(emit_config(cfg), "reparsed");

  // Twelve significant digits survive the round trip.
  const SystemSpec& s = cfg.system;
  const SystemSpec& r = back.system;
  for (int i = 0; i < 3; ++i) {
    CHECK(rel_err(r.trap.d[i], s.trap.d[i]) < 1e-11);
    CHECK(rel_err(r.trap.alpha[i], s.trap.alpha[i]) < 1e-11);
  }
  CHECK(rel_err(r.trap.omega_f, s.trap.omega_f) < 1e-11);
  CHECK(rel_err(r.particle.charge, s.particle.charge) < 1e-11);
  CHECK(rel_err(r.gas.pressure, s.gas.pressure) < 1e-11);
  CHECK(rel_err(r.feedback.gamma_fb, s.feedback.gamma_fb) < 1e-11);
  CHECK(rel_err(r.doppler.gamma_dop, s.doppler.gamma_dop) < 1e-11);
  CHECK(rel_err(r.edot_td, s.edot_td) < 1e-11);
  CHECK(r.n_ions == s.n_ions);

  REQUIRE(back.scenarios.size() == 1);
  const Scenario& sc = back.scenarios[0];
  CHECK(sc.name == "cool");
  CHECK(sc.task == TaskKind::steady_state);
  CHECK(sc.output == "cool.csv");
  CHECK(sc.seed == 9);
  CHECK(sc.axis == Axis::z);
  CHECK(rel_err(sc.gamma_p, cfg.scenarios[0].gamma_p) < 1e-11);
  REQUIRE(sc.edot_td.has_value());
  CHECK(rel_err(*sc.edot_td, 1e-27) < 1e-11);
  CHECK(sc.restarts == 4);
  CHECK(sc.screen_drive);
  REQUIRE(sc.sweep.has_value());
  CHECK(sc.sweep->parameter == "pressure");
  CHECK(sc.sweep->log_scale);
  CHECK(rel_err(sc.sweep->from, 1e-9) < 1e-11);
  CHECK(rel_err(sc.sweep->to, 1e-5) < 1e-11);
  CHECK(sc.sweep->points == 7);
}

TEST_CASE("bundled presets parse and match the reference operating point") {
  const std::vector<std::string> names = preset_names();
  REQUIRE(names.size() == 5);
  std::set<std::string> digests;
  for (const std::string& name : names) {
    const Config cfg = preset_config(name);
    CHECK(!cfg.scenarios.empty());
    digests.insert(cfg.digest);
  }
  CHECK(digests.size() == 5);  // presets are pairwise distinct
  CHECK(thrown_code([] { preset_config("fig9_imaginary"); }) ==
        ErrorCode::unknown_preset);

  // The shared system block reproduces the reference fixtures exactly.
  const Config t1 = preset_config("table1");
  const TrapConfig want_trap = table_trap();
  const ParticleSpec want_p = table_particle();
  const ParticleSpec want_i = table_ion();
  for (int i = 0; i < 3; ++i) {
    CHECK(rel_err(t1.system.trap.d[i], want_trap.d[i]) < 1e-15);
    CHECK(t1.system.trap.alpha[i] == doctest::Approx(want_trap.alpha[i]));
    CHECK(t1.system.trap.U0[i] == doctest::Approx(want_trap.U0[i]));
    CHECK(t1.system.trap.Us[i] == doctest::Approx(want_trap.Us[i]));
    CHECK(t1.system.trap.Uf[i] == doctest::Approx(want_trap.Uf[i]));
  }
  CHECK(rel_err(t1.system.trap.omega_s, want_trap.omega_s) < 1e-15);
  CHECK(rel_err(t1.system.trap.omega_f, want_trap.omega_f) < 1e-15);
  CHECK(rel_err(t1.system.particle.mass, want_p.mass) < 1e-15);
  CHECK(rel_err(t1.system.particle.charge, want_p.charge) < 1e-15);
  CHECK(rel_err(t1.system.particle.radius, want_p.radius) < 1e-15);
  CHECK(t1.system.particle.eps_r == doctest::Approx(want_p.eps_r));
  CHECK(rel_err(t1.system.ion.mass, want_i.mass) < 1e-15);
  CHECK(rel_err(t1.system.ion.charge, want_i.charge) < 1e-15);
  CHECK(t1.system.gas.pressure == doctest::Approx(9.98433e-9).epsilon(1e-12));
  CHECK(rel_err(t1.system.doppler.gamma_dop, units::two_pi * 1e4) < 1e-15);
  CHECK(t1.system.doppler.edot == doctest::Approx(3.8e-22).epsilon(1e-15));
  CHECK(t1.system.edot_td == doctest::Approx(2.8e-26).epsilon(1e-15));

  // table1 runs one scenario per task family.
  REQUIRE(t1.scenarios.size() == 5);
  CHECK(t1.scenarios[0].task == TaskKind::frequencies);
  CHECK(t1.scenarios[1].task == TaskKind::equilibria);
  CHECK(t1.scenarios[1].screen_drive);
  CHECK(t1.scenarios[2].task == TaskKind::couplings);
  CHECK(t1.scenarios[3].task == TaskKind::steady_state);
  CHECK(t1.scenarios[4].task == TaskKind::floquet);
  CHECK(t1.scenarios[4].axis == Axis::x);

  // The damping sweep spans the full requested decade range.
  const Config f3 = preset_config("fig3_sweep");
  REQUIRE(f3.scenarios.size() == 2);
  for (const Scenario& sc : f3.scenarios) {
    REQUIRE(sc.sweep.has_value());
    CHECK(sc.sweep->parameter == "gamma_p");
    CHECK(rel_err(sc.sweep->from, units::two_pi * 1e-8) < 1e-15);
    CHECK(rel_err(sc.sweep->to, units::two_pi * 1e3) < 1e-15);
    CHECK(sc.sweep->points == 50);
  }
  CHECK(!f3.scenarios[0].edot_td);
  REQUIRE(f3.scenarios[1].edot_td.has_value());
  CHECK(*f3.scenarios[1].edot_td == 0.0);

  // The ion-number sweep covers 1..12 with a pinned seed.
  const Config f5 = preset_config("fig5_nion");
  REQUIRE(f5.scenarios.size() == 1);
  CHECK(f5.scenarios[0].task == TaskKind::n_ion_sweep);
  REQUIRE(f5.scenarios[0].sweep.has_value());
  CHECK(f5.scenarios[0].sweep->from == 1.0);
  CHECK(f5.scenarios[0].sweep->to == 12.0);
  CHECK(f5.scenarios[0].sweep->points == 12);
}

TEST_CASE("load_config reads a file identically to parse_config") {
  const std::string path = "/tmp/cotrap_test_config.yaml";
  {
    std::ofstream out(path, std::ios::binary);
    out << base_yaml();
  }
  const Config from_file = load_config(path);
  const Config from_text = parse_config(base_yaml(), path);
  CHECK(from_file.digest == from_text.digest);
  std::remove(path.c_str());
}
