#include "rollsim/sensor_timing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rollsim/errors.hpp"

namespace rollsim {

Nanos to_nanos(double microseconds) {
  return static_cast<Nanos>(std::llround(microseconds * 1000.0));
}

double to_micros(Nanos ns) { return static_cast<double>(ns) / 1000.0; }

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return q;
}

void CameraSpec::validate() const {
  if (!(frame_rate > 0.0)) throw ConfigError("camera.frame_rate must be > 0");
  if (n_rows_visible < 1 || n_rows_visible > n_rows_total) {
    throw ConfigError("camera rows must satisfy 1 <= rows_visible <= rows_total");
  }
  if (min_luminous_exposure && !(*min_luminous_exposure > 0.0)) {
    throw ConfigError("camera.min_luminous_exposure must be > 0");
  }
  if (exposure_range && !(exposure_range->min_us > 0.0 &&
                          exposure_range->min_us <= exposure_range->max_us)) {
    throw ConfigError("camera exposure range must satisfy 0 < min <= max");
  }
  if (reset_interval_us && !(*reset_interval_us > 0.0)) {
    throw ConfigError("camera.reset_interval_us must be > 0");
  }
}

void LaserConfig::validate() const {
  if (!(frequency_hz > 0.0)) throw ConfigError("laser.frequency_hz must be > 0");
  if (!(duty_cycle > 0.0 && duty_cycle < 1.0)) {
    throw ConfigError("laser.duty_cycle must be in (0, 1)");
  }
  for (double c : color) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("laser.color components must be in [0, 1]");
  }
  if (!(irradiance_gain >= 0.0)) throw ConfigError("laser.irradiance_gain must be >= 0");
}

double LaserConfig::on_time_us() const { return duty_cycle / frequency_hz * 1e6; }

void EnvConditions::validate() const {
  if (!(illuminance_lux > 0.0)) throw ConfigError("env.illuminance_lux must be > 0");
  if (!(exposure_us > 0.0)) throw ConfigError("env.exposure_us must be > 0");
}

double delta_t_rst(const CameraSpec& spec) {
  return 1e6 / (spec.frame_rate * spec.n_rows_total);
}

double reset_interval(const CameraSpec& spec) {
  return spec.reset_interval_us ? *spec.reset_interval_us : delta_t_rst(spec);
}

int estimate_n_rows(int n_visible, double visible_fraction) {
  if (!(visible_fraction > 0.0) || visible_fraction > 1.0) {
    throw ConfigError("visible_fraction must be in (0, 1]");
  }
  return static_cast<int>(std::lround(n_visible / visible_fraction));
}

ExposureEstimate estimate_exposure(double min_luminous_exposure,
                                   double illuminance_lux,
                                   const std::optional<ExposureRange>& range) {
  if (!(min_luminous_exposure > 0.0) || !(illuminance_lux > 0.0)) {
    throw ConfigError("H_v and E_v must both be > 0");
  }
  ExposureEstimate est;
  est.exposure_us = min_luminous_exposure / illuminance_lux * 1e6;
  if (range) {
    double clamped = std::clamp(est.exposure_us, range->min_us, range->max_us);
    est.clamped = clamped != est.exposure_us;
    est.exposure_us = clamped;
  }
  return est;
}

int distortion_size(double t_exp_us, double t_on_us, double delta_t_rst_us,
                    double offset_us) {
  const Nanos exp = to_nanos(t_exp_us);
  const Nanos on = to_nanos(t_on_us);
  const Nanos delta = to_nanos(delta_t_rst_us);
  const Nanos o = to_nanos(offset_us);
  if (exp <= 0 || on <= 0 || delta <= 0) {
    throw ConfigError("t_exp, t_on and delta_t_rst must be > 0");
  }
  if (o < 0 || o >= delta) throw ConfigError("offset must lie in [0, delta_t_rst)");
  return static_cast<int>(ceil_div(exp - o, delta) + ceil_div(on + o, delta) - 1);
}

DistortionBounds distortion_bounds(double t_exp_us, double t_on_us,
                                   double delta_t_rst_us) {
  const Nanos exp = to_nanos(t_exp_us);
  const Nanos on = to_nanos(t_on_us);
  const Nanos delta = to_nanos(delta_t_rst_us);
  if (exp <= 0 || on <= 0 || delta <= 0) {
    throw ConfigError("t_exp, t_on and delta_t_rst must be > 0");
  }
  DistortionBounds b;
  b.n_min = static_cast<int>(ceil_div(exp, delta) + ceil_div(on, delta) - 2);
  b.n_max = b.n_min + 2;
  return b;
}

double distortions_per_frame(const LaserConfig& laser, const CameraSpec& spec) {
  return laser.frequency_hz / spec.frame_rate * spec.visible_ratio();
}

double on_time(const LaserConfig& laser) { return laser.on_time_us(); }

double misestimation_ratio(double t_exp_true_us, double t_exp_est_us,
                           double t_on_us, double delta_t_rst_us) {
  const int actual = distortion_bounds(t_exp_true_us, t_on_us, delta_t_rst_us).n_max;
  const int expected = distortion_bounds(t_exp_est_us, t_on_us, delta_t_rst_us).n_max;
  return static_cast<double>(actual) / expected;
}

TimingPlan make_plan(const CameraSpec& spec, const LaserConfig& laser,
                     double t_exp_us, double offset_us) {
  spec.validate();
  laser.validate();
  TimingPlan plan;
  plan.delta_t_rst_us = reset_interval(spec);
  plan.offset_us = offset_us;
  const double t_on = laser.on_time_us();
  plan.n_o = distortion_size(t_exp_us, t_on, plan.delta_t_rst_us, offset_us);
  const auto bounds = distortion_bounds(t_exp_us, t_on, plan.delta_t_rst_us);
  plan.n_min = bounds.n_min;
  plan.n_max = bounds.n_max;
  plan.n_min_effective = bounds.n_min_effective();
  plan.n_d = distortions_per_frame(laser, spec);
  return plan;
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || hi < lo) throw ConfigError("invalid log_space range");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SurfaceResult misestimation_surface(const SurfaceGrid& grid) {
  if (grid.t_exp_true_us.empty() || grid.t_exp_est_us.empty() || grid.t_on_us.empty()) {
    throw ConfigError("misestimation grid axes must be nonempty");
  }
  SurfaceResult result;
  result.rows.reserve(grid.t_exp_true_us.size() * grid.t_exp_est_us.size() *
                      grid.t_on_us.size());
  std::size_t within = 0;
  for (double t_on : grid.t_on_us) {
    SurfaceSlice slice;
    slice.t_on_us = t_on;
    std::size_t slice_within = 0;
    std::size_t slice_count = 0;
    for (double t_true : grid.t_exp_true_us) {
      for (double t_est : grid.t_exp_est_us) {
        const double r = misestimation_ratio(t_true, t_est, t_on, grid.delta_t_rst_us);
        result.rows.push_back({t_true, t_est, t_on, r});
        slice.max_ratio = std::max(slice.max_ratio, r);
        if (r >= 0.5 && r <= 2.0) ++slice_within;
        ++slice_count;
      }
    }
    slice.fraction_within_two = static_cast<double>(slice_within) / slice_count;
    within += slice_within;
    result.max_ratio = std::max(result.max_ratio, slice.max_ratio);
    result.slices.push_back(slice);
  }
  result.fraction_within_two = static_cast<double>(within) / result.rows.size();
  return result;
}

SurfaceGrid default_surface_grid(ExposureRange exposure, ExposureRange on_time,
                                 double delta_t_rst_us, int points) {
  SurfaceGrid grid;
  grid.t_exp_true_us = log_space(exposure.min_us, exposure.max_us, points);
  grid.t_exp_est_us = grid.t_exp_true_us;
  grid.t_on_us = log_space(on_time.min_us, on_time.max_us, points);
  grid.delta_t_rst_us = delta_t_rst_us;
  return grid;
}

std::string surface_csv(const SurfaceResult& result) {
  std::ostringstream out;
  out.precision(10);
  out << "t_exp_true_us,t_exp_est_us,t_on_us,ratio\n";
  for (const auto& row : result.rows) {
    out << row.t_exp_true_us << ',' << row.t_exp_est_us << ',' << row.t_on_us << ','
        << row.ratio << '\n';
  }
  return out.str();
}

CameraPreset logitech_c922() {
  CameraPreset p;
  p.name = "logitech_c922";
  p.spec.frame_rate = 30.0;
  p.spec.n_rows_total = 1080;
  p.spec.n_rows_visible = 1080;
  p.spec.exposure_range = ExposureRange{100.0, 2500.0};
  // Measured value; 1/(30*1080) would give 30.9us.
  p.spec.reset_interval_us = 46.3;
  p.exposure = {100.0, 2500.0};
  p.on_time = {320.0, 16000.0};
  p.frequency_hz = {30.0, 900.0};
  return p;
}

CameraPreset axis_m3045v() {
  CameraPreset p;
  p.name = "axis_m3045v";
  p.spec.frame_rate = 25.0;
  p.spec.n_rows_total = 2160;
  p.spec.n_rows_visible = 1080;
  p.spec.min_luminous_exposure = 0.25;
  p.spec.exposure_range = ExposureRange{32.0, 1000.0};
  p.exposure = {32.0, 1000.0};
  p.on_time = {50.0, 400.0};
  p.frequency_hz = {25.0, 750.0};
  return p;
}

}  // namespace rollsim
