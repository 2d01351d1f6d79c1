// Scenario execution: builds the physical system a config describes, runs
// each task (optionally across a swept parameter, points in parallel), and
// writes the CSV and JSON artifacts plus a machine-readable run manifest.
//
// Output conventions: CSVs carry a header row and one %.*e value per cell
// (9 significant digits, period decimal separator, LF endings), so a fixed
// config and seed reproduce them byte for byte. Frequencies are written as
// cyclic Hz; everything else stays in SI base units.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"

namespace cotrap {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 0;  // > 0 replaces every scenario's own seed
  int threads = 0;         // <= 0 picks the hardware concurrency
};

struct ScenarioResult {
  std::string name;
  std::string task;
  std::string status = "ok";          // "ok" or "error"
  std::string error;                  // populated when status == "error"
  std::vector<std::string> outputs;   // file names relative to the out dir
  std::vector<std::string> warnings;  // validity diagnostics, point failures
  std::vector<std::string> summary;   // human-readable result highlights
};

struct RunManifest {
  std::string config_digest;
  std::string version;
  std::string timestamp;  // UTC, 2026-01-31T12:34:56Z
  std::vector<ScenarioResult> scenarios;
  bool all_ok = true;
};

// Executes every scenario in order, continuing past per-scenario failures,
// and writes the artifacts plus manifest.json into opt.out_dir (created if
// missing). Sweep points run on a thread pool; rows are assembled in point
// order and written serially, so the thread count never changes the bytes.
RunManifest run_scenarios(const Config& cfg, const RunOptions& opt = {});

// The manifest as written to manifest.json.
std::string manifest_json(const RunManifest& m);

// Plain-text run summary: per-scenario status, result highlights (layouts
// and their stability, occupations, temperatures) and validity warnings.
std::string emit_report(const RunManifest& m);

}  // namespace cotrap
