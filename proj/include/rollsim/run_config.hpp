#pragma once

// Run configuration: a flat key = value file with dotted section names.
// Unknown keys are errors. See README.md for the full key list.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rollsim/corruption.hpp"
#include "rollsim/pattern_synth.hpp"
#include "rollsim/sensor_timing.hpp"

namespace rollsim {

struct SweepAxes {
  std::vector<double> frequencies_hz{25.0, 250.0, 500.0, 750.0};
  std::vector<double> duty_cycles;  // defaults to 12 log-spaced points in [0.001, 0.4]
  std::vector<double> exposures_us{32.0, 200.0};
  int synth_frames = 100;         // frames synthesized per configuration
  int patterns_per_config = 10;   // non-empty patterns drawn per configuration
  int stealth_pairs = 10;         // evenly spaced frame pairs per video
};

struct RunConfig {
  CameraSpec camera;
  DeadAreaLayout layout = DeadAreaLayout::kTrailingBlock;
  LaserConfig laser;
  bool laser_phase_explicit = false;
  std::optional<double> illuminance_lux;
  std::optional<double> exposure_us;
  SweepAxes sweep;
  BlindingModel blinding;
  std::filesystem::path corpus_root;
  int every_k = 10;
  std::string detector_kind = "blob";
  std::string detector_command;
  double score_threshold = 0.5;
  int synth_frames = 100;
  int surface_points = 64;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  // Environment with t_exp resolved: explicit env.exposure_us wins, otherwise
  // H_v / E_v (clamped to the camera range). Throws ConfigError naming the
  // keys to supply when neither is available.
  EnvConditions resolve_env(bool* clamped = nullptr) const;
};

RunConfig default_run_config();

// Parses `key = value` lines; '#' starts a comment. Throws ConfigError with
// the line number on syntax errors, unknown keys or bad values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Keys accepted in config files, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace rollsim
