#pragma once

// Rolling-shutter timing model: row reset interval, distortion size and
// bounds, distortion repetition, and exposure estimation.
//
// Public functions take and return microseconds. Ceiling arithmetic is done
// on integer nanoseconds so boundary cases (exact multiples of the reset
// interval) resolve deterministically.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rollsim {

using Nanos = std::int64_t;

Nanos to_nanos(double microseconds);
double to_micros(Nanos ns);

// Mathematical ceiling of num/den for den > 0.
std::int64_t ceil_div(std::int64_t num, std::int64_t den);

struct ExposureRange {
  double min_us = 0.0;
  double max_us = 0.0;
};

struct CameraSpec {
  double frame_rate = 25.0;  // frames per second
  int n_rows_total = 1080;
  int n_rows_visible = 1080;
  // Minimal luminous exposure H_v in lux*seconds.
  std::optional<double> min_luminous_exposure;
  std::optional<ExposureRange> exposure_range;
  // Datasheet reset interval; when set it takes precedence over 1/(F*N_rows).
  std::optional<double> reset_interval_us;

  void validate() const;  // throws ConfigError
  bool has_dead_area() const { return n_rows_visible < n_rows_total; }
  double visible_ratio() const {
    return static_cast<double>(n_rows_visible) / n_rows_total;
  }
};

using Rgb = std::array<double, 3>;

struct LaserConfig {
  double frequency_hz = 750.0;
  double duty_cycle = 0.4;
  double phase_s = 0.0;
  Rgb color{0.25, 0.45, 1.0};
  double irradiance_gain = 1.0;

  void validate() const;
  // t_on = D / f, in microseconds.
  double on_time_us() const;
};

struct EnvConditions {
  double illuminance_lux = 400.0;
  double exposure_us = 200.0;

  void validate() const;
};

struct TimingPlan {
  double delta_t_rst_us = 0.0;
  double offset_us = 0.0;
  int n_o = 0;
  int n_min = 0;
  int n_max = 0;
  int n_min_effective = 1;
  double n_d = 0.0;
};

// 1 / (F * N_rows) in microseconds.
double delta_t_rst(const CameraSpec& spec);

// The reset interval actually used for a camera: the datasheet override when
// present, otherwise delta_t_rst().
double reset_interval(const CameraSpec& spec);

// Total row count inferred from the visible/invisible distortion ratio.
int estimate_n_rows(int n_visible, double visible_fraction);

struct ExposureEstimate {
  double exposure_us = 0.0;
  bool clamped = false;
};

// t_exp = H_v / E_v (H_v in lux*seconds), clamped to the camera's exposure
// range when one is given.
ExposureEstimate estimate_exposure(
    double min_luminous_exposure, double illuminance_lux,
    const std::optional<ExposureRange>& range = std::nullopt);

// Rows hit by one pulse when the pulse starts o after the last row reset.
int distortion_size(double t_exp_us, double t_on_us, double delta_t_rst_us,
                    double offset_us);

struct DistortionBounds {
  int n_min = 0;
  int n_max = 0;
  int n_min_effective() const { return n_min < 1 ? 1 : n_min; }
};

DistortionBounds distortion_bounds(double t_exp_us, double t_on_us,
                                   double delta_t_rst_us);

// (f / F) * (N_visible / N_rows).
double distortions_per_frame(const LaserConfig& laser, const CameraSpec& spec);

double on_time(const LaserConfig& laser);

// N_max(true) / N_max(estimated).
double misestimation_ratio(double t_exp_true_us, double t_exp_est_us,
                           double t_on_us, double delta_t_rst_us);

TimingPlan make_plan(const CameraSpec& spec, const LaserConfig& laser,
                     double t_exp_us, double offset_us = 0.0);

std::vector<double> log_space(double lo, double hi, int n);

struct SurfaceGrid {
  std::vector<double> t_exp_true_us;
  std::vector<double> t_exp_est_us;
  std::vector<double> t_on_us;
  double delta_t_rst_us = 0.0;
};

struct SurfaceRow {
  double t_exp_true_us;
  double t_exp_est_us;
  double t_on_us;
  double ratio;
};

struct SurfaceSlice {
  double t_on_us = 0.0;
  double max_ratio = 0.0;
  double fraction_within_two = 0.0;
};

struct SurfaceResult {
  std::vector<SurfaceRow> rows;
  double max_ratio = 0.0;
  double fraction_within_two = 0.0;  // ratio in [0.5, 2]
  std::vector<SurfaceSlice> slices;  // one per t_on, in grid order
};

SurfaceResult misestimation_surface(const SurfaceGrid& grid);

// Default grid over a camera's exposure and on-time ranges.
SurfaceGrid default_surface_grid(ExposureRange exposure, ExposureRange on_time,
                                 double delta_t_rst_us, int points = 64);

std::string surface_csv(const SurfaceResult& result);

// Cameras characterised in the attack experiments, with their exposure and
// on-time ranges.
struct CameraPreset {
  std::string name;
  CameraSpec spec;
  ExposureRange exposure;
  ExposureRange on_time;
  ExposureRange frequency_hz;
};

CameraPreset logitech_c922();
CameraPreset axis_m3045v();

}  // namespace rollsim
