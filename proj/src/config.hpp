// Configuration ingestion: a YAML document (JSON also accepted) describing
// the trap, the two species, the noise environment and a list of scenarios
// to execute. All quantities may carry units ("7e-11 mbar", "17.5 MHz",
// "750 e"); values in frequency units are cyclic and stored as angular
// rad/s, everything else lands in SI base units.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rates.hpp"
#include "trap.hpp"

namespace cotrap {

// Everything physical a run needs, normalized to engine units.
struct SystemSpec {
  TrapConfig trap;
  ParticleSpec particle;
  ParticleSpec ion;
  GasSpec gas;
  FeedbackSpec feedback;
  DopplerSpec doppler;
  double edot_td = 0.0;  // W, trap-displacement heating power
  int n_ions = 1;
};

enum class TaskKind {
  frequencies,
  equilibria,
  couplings,
  steady_state,
  floquet,
  n_ion_sweep,
};

const char* task_name(TaskKind kind);

// Named parameter swept across points. Bounds are stored normalized (the
// same conversion as the parameter's direct setting).
struct SweepSpec {
  std::string parameter;
  bool log_scale = false;
  double from = 0.0;
  double to = 0.0;
  int points = 1;
};

struct Scenario {
  std::string name;
  TaskKind task = TaskKind::frequencies;
  std::string output;  // file stem, resolved against the output directory
  std::uint64_t seed = 1;
  std::optional<SweepSpec> sweep;
  Axis axis = Axis::x;             // trace/sweep axis for floquet tasks
  double gamma_p = -1.0;           // rad/s, velocity damping override
  std::optional<double> edot_td;   // W, per-scenario displacement noise
  int restarts = 0;                // equilibrium searches, 0 = auto
  bool screen_drive = false;       // run period-map screening on equilibria
};

struct Config {
  SystemSpec system;
  std::vector<Scenario> scenarios;
  std::string digest;  // 16 hex digits, stable under key reordering
};

// Parses and validates a config document. The origin string is used in
// error messages (a path for load_config, any label for parse_config).
Config load_config(const std::string& path);
Config parse_config(const std::string& text, const std::string& origin);

// Canonical sorted-key JSON rendering of a normalized config; the digest
// is a 64-bit FNV-1a over exactly this string.
std::string canonical_json(const Config& cfg);

// Re-emits a config as a YAML document in engine units. Parsing the
// result reproduces every value to 12 significant digits.
std::string emit_config(const Config& cfg);

// Bundled presets, by name. The same text is shipped under presets/ for
// reference; unknown names raise unknown_preset.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);
Config preset_config(const std::string& name);

}  // namespace cotrap
