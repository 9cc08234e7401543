#include "rollsim/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "rollsim/corpus_io.hpp"
#include "rollsim/errors.hpp"

namespace rollsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + v + "' is not a number");
  }
  if (used != v.size()) throw ConfigError("'" + v + "' is not a number");
  return out;
}

long long parse_int(const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("'" + v + "' is not an integer");
  }
  return out;
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

Rgb parse_rgb(const std::string& v) {
  const auto list = parse_list(v);
  if (list.size() != 3) throw ConfigError("expected three comma-separated components");
  return {list[0], list[1], list[2]};
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table{
      {"camera.frame_rate", [](RunConfig& c, const std::string& v) { c.camera.frame_rate = parse_double(v); }},
      {"camera.rows_total", [](RunConfig& c, const std::string& v) { c.camera.n_rows_total = static_cast<int>(parse_int(v)); }},
      {"camera.rows_visible", [](RunConfig& c, const std::string& v) { c.camera.n_rows_visible = static_cast<int>(parse_int(v)); }},
      {"camera.min_luminous_exposure", [](RunConfig& c, const std::string& v) { c.camera.min_luminous_exposure = parse_double(v); }},
      {"camera.exposure_min_us", [](RunConfig& c, const std::string& v) {
         if (!c.camera.exposure_range) c.camera.exposure_range = ExposureRange{};
         c.camera.exposure_range->min_us = parse_double(v);
       }},
      {"camera.exposure_max_us", [](RunConfig& c, const std::string& v) {
         if (!c.camera.exposure_range) c.camera.exposure_range = ExposureRange{};
         c.camera.exposure_range->max_us = parse_double(v);
       }},
      {"camera.reset_interval_us", [](RunConfig& c, const std::string& v) { c.camera.reset_interval_us = parse_double(v); }},
      {"camera.dead_area_layout", [](RunConfig& c, const std::string& v) { c.layout = parse_layout(v); }},
      {"laser.frequency_hz", [](RunConfig& c, const std::string& v) { c.laser.frequency_hz = parse_double(v); }},
      {"laser.duty_cycle", [](RunConfig& c, const std::string& v) { c.laser.duty_cycle = parse_double(v); }},
      {"laser.phase_s", [](RunConfig& c, const std::string& v) {
         c.laser.phase_s = parse_double(v);
         c.laser_phase_explicit = true;
       }},
      {"laser.color", [](RunConfig& c, const std::string& v) { c.laser.color = parse_rgb(v); }},
      {"laser.irradiance_gain", [](RunConfig& c, const std::string& v) { c.laser.irradiance_gain = parse_double(v); }},
      {"env.illuminance_lux", [](RunConfig& c, const std::string& v) { c.illuminance_lux = parse_double(v); }},
      {"env.exposure_us", [](RunConfig& c, const std::string& v) { c.exposure_us = parse_double(v); }},
      {"sweep.frequencies_hz", [](RunConfig& c, const std::string& v) { c.sweep.frequencies_hz = parse_list(v); }},
      {"sweep.duty_cycles", [](RunConfig& c, const std::string& v) { c.sweep.duty_cycles = parse_list(v); }},
      {"sweep.exposures_us", [](RunConfig& c, const std::string& v) { c.sweep.exposures_us = parse_list(v); }},
      {"sweep.synth_frames", [](RunConfig& c, const std::string& v) { c.sweep.synth_frames = static_cast<int>(parse_int(v)); }},
      {"sweep.patterns_per_config", [](RunConfig& c, const std::string& v) { c.sweep.patterns_per_config = static_cast<int>(parse_int(v)); }},
      {"sweep.stealth_pairs", [](RunConfig& c, const std::string& v) { c.sweep.stealth_pairs = static_cast<int>(parse_int(v)); }},
      {"blinding.center_x", [](RunConfig& c, const std::string& v) { c.blinding.center_x = parse_double(v); }},
      {"blinding.center_y", [](RunConfig& c, const std::string& v) { c.blinding.center_y = parse_double(v); }},
      {"blinding.peak_intensity", [](RunConfig& c, const std::string& v) { c.blinding.peak_intensity = parse_double(v); }},
      {"blinding.falloff_radius", [](RunConfig& c, const std::string& v) { c.blinding.falloff_radius = parse_double(v); }},
      {"blinding.color", [](RunConfig& c, const std::string& v) { c.blinding.color = parse_rgb(v); }},
      {"corpus.root", [](RunConfig& c, const std::string& v) { c.corpus_root = v; }},
      {"corpus.every_k", [](RunConfig& c, const std::string& v) { c.every_k = static_cast<int>(parse_int(v)); }},
      {"detector.kind", [](RunConfig& c, const std::string& v) { c.detector_kind = v; }},
      {"detector.command", [](RunConfig& c, const std::string& v) { c.detector_command = v; }},
      {"detector.score_threshold", [](RunConfig& c, const std::string& v) { c.score_threshold = parse_double(v); }},
      {"synth.n_frames", [](RunConfig& c, const std::string& v) { c.synth_frames = static_cast<int>(parse_int(v)); }},
      {"surface.points", [](RunConfig& c, const std::string& v) { c.surface_points = static_cast<int>(parse_int(v)); }},
      {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_int(v)); }},
      {"run.out", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"run.jobs", [](RunConfig& c, const std::string& v) { c.jobs = static_cast<int>(parse_int(v)); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig default_run_config() {
  RunConfig c;
  c.sweep.duty_cycles = log_space(0.001, 0.40, 12);
  return c;
}

EnvConditions RunConfig::resolve_env(bool* clamped) const {
  EnvConditions env;
  if (clamped) *clamped = false;
  if (illuminance_lux) env.illuminance_lux = *illuminance_lux;
  if (exposure_us) {
    env.exposure_us = *exposure_us;
  } else if (camera.min_luminous_exposure && illuminance_lux) {
    const auto est = estimate_exposure(*camera.min_luminous_exposure, *illuminance_lux,
                                       camera.exposure_range);
    env.exposure_us = est.exposure_us;
    if (clamped) *clamped = est.clamped;
  } else if (!camera.min_luminous_exposure) {
    throw ConfigError(
        "exposure time unknown: set env.exposure_us, or set camera.min_luminous_exposure "
        "together with env.illuminance_lux");
  } else {
    throw ConfigError("exposure time unknown: set env.illuminance_lux (or env.exposure_us)");
  }
  env.validate();
  return env;
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg = default_run_config();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const auto& entry) { return entry.first == key; });
    if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  cfg.camera.validate();
  cfg.laser.validate();
  cfg.blinding.validate();
  if (cfg.sweep.frequencies_hz.empty() || cfg.sweep.duty_cycles.empty() ||
      cfg.sweep.exposures_us.empty()) {
    throw ConfigError("sweep axes must be nonempty");
  }
  if (cfg.sweep.synth_frames < 1 || cfg.synth_frames < 1) {
    throw ConfigError("sweep.synth_frames and synth.n_frames must be >= 1");
  }
  if (cfg.sweep.patterns_per_config < 1) throw ConfigError("sweep.patterns_per_config must be >= 1");
  if (cfg.sweep.stealth_pairs < 0) throw ConfigError("sweep.stealth_pairs must be >= 0");
  if (cfg.surface_points < 1) throw ConfigError("surface.points must be >= 1");
  if (cfg.every_k < 1) throw ConfigError("corpus.every_k must be >= 1");
  if (cfg.jobs < 1) throw ConfigError("run.jobs must be >= 1");
  if (cfg.score_threshold < 0.0 || cfg.score_threshold > 1.0) {
    throw ConfigError("detector.score_threshold must be in [0, 1]");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text);
}

}  // namespace rollsim
