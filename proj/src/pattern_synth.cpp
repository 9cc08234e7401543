#include "rollsim/pattern_synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rollsim/errors.hpp"

namespace rollsim {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Converts a dense per-row intensity buffer into sorted, maximal intervals.
std::vector<RowInterval> runs_from_rows(std::span<const double> rows) {
  std::vector<RowInterval> out;
  const int n = static_cast<int>(rows.size());
  int r = 0;
  while (r < n) {
    if (rows[r] <= 0.0) {
      ++r;
      continue;
    }
    RowInterval iv;
    iv.row_start = r;
    while (r < n && rows[r] > 0.0) {
      iv.intensity.push_back(std::min(1.0, rows[r]));
      ++r;
    }
    iv.row_end = r - 1;
    out.push_back(std::move(iv));
  }
  return out;
}

}  // namespace

double RowInterval::centroid() const {
  double w = 0.0;
  double s = 0.0;
  for (int i = 0; i < rows(); ++i) {
    w += intensity[i];
    s += intensity[i] * (row_start + i);
  }
  return w > 0.0 ? s / w : 0.5 * (row_start + row_end);
}

double DistortionPattern::centroid() const {
  double w = 0.0;
  double s = 0.0;
  for (const auto& iv : intervals) {
    for (int i = 0; i < iv.rows(); ++i) {
      w += iv.intensity[i];
      s += iv.intensity[i] * (iv.row_start + i);
    }
  }
  return w > 0.0 ? s / w : -1.0;
}

void DistortionPattern::validate(int n_visible) const {
  int prev_end = -1;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    const std::string where = "frame " + std::to_string(frame_index) + " interval " +
                              std::to_string(i) + ": ";
    if (iv.row_start < 0 || iv.row_end < iv.row_start || iv.row_end >= n_visible) {
      throw DataError(where + "rows out of range");
    }
    if (iv.row_start <= prev_end) throw DataError(where + "intervals overlap or unsorted");
    if (static_cast<int>(iv.intensity.size()) != iv.rows()) {
      throw DataError(where + "intensity length does not match row count");
    }
    for (double a : iv.intensity) {
      if (!(a >= 0.0 && a <= 1.0)) throw DataError(where + "intensity outside [0, 1]");
    }
    prev_end = iv.row_end;
  }
}

DeadAreaLayout parse_layout(const std::string& name) {
  if (name == "trailing_block") return DeadAreaLayout::kTrailingBlock;
  if (name == "leading_block") return DeadAreaLayout::kLeadingBlock;
  if (name == "split") return DeadAreaLayout::kSplit;
  throw ConfigError("unknown dead area layout '" + name + "'");
}

std::string layout_name(DeadAreaLayout layout) {
  switch (layout) {
    case DeadAreaLayout::kTrailingBlock:
      return "trailing_block";
    case DeadAreaLayout::kLeadingBlock:
      return "leading_block";
    case DeadAreaLayout::kSplit:
      return "split";
  }
  return "trailing_block";
}

int first_visible_row(const CameraSpec& spec, DeadAreaLayout layout) {
  const int dead = spec.n_rows_total - spec.n_rows_visible;
  switch (layout) {
    case DeadAreaLayout::kTrailingBlock:
      return 0;
    case DeadAreaLayout::kLeadingBlock:
      return dead;
    case DeadAreaLayout::kSplit:
      return dead / 2;
  }
  return 0;
}

void TimelineConfig::validate() const {
  spec.validate();
  laser.validate();
  env.validate();
  if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
}

SynthesisResult synthesize(const TimelineConfig& config) {
  config.validate();
  const CameraSpec& spec = config.spec;
  const LaserConfig& laser = config.laser;

  // Time is measured in units of one row reset interval. Without a datasheet
  // override the frame rate and row count define the unit exactly.
  const double rows_per_second = spec.reset_interval_us
                                     ? 1e6 / *spec.reset_interval_us
                                     : spec.frame_rate * spec.n_rows_total;
  const double spacing = rows_per_second / laser.frequency_hz;
  const double exposure = config.env.exposure_us * 1e-6 * rows_per_second;
  const double on = laser.on_time_us() * 1e-6 * rows_per_second;

  SynthesisResult result;
  if (config.explicit_phase) {
    result.phase_s = laser.phase_s;
  } else {
    std::mt19937_64 rng(config.seed);
    result.phase_s = unit_uniform(rng) / laser.frequency_hz;
  }
  const double phase = result.phase_s * rows_per_second;

  const std::int64_t n_rows = spec.n_rows_total;
  const int n_visible = spec.n_rows_visible;
  const int v0 = first_visible_row(spec, config.dead_area_layout);
  const std::int64_t total_rows = n_rows * config.n_frames;

  std::vector<double> buffer(static_cast<std::size_t>(config.n_frames) * n_visible, 0.0);
  result.injections_per_frame.assign(static_cast<std::size_t>(config.n_frames), 0);

  const auto j_min = static_cast<std::int64_t>(std::ceil((-on - phase) / spacing));
  const auto j_max =
      static_cast<std::int64_t>(std::floor((total_rows + exposure - phase) / spacing));
  for (std::int64_t j = j_min; j <= j_max; ++j) {
    const double start = static_cast<double>(j) * spacing + phase;
    const double stop = start + on;

    const auto onset_row = static_cast<std::int64_t>(std::floor(start));
    if (onset_row >= 0 && onset_row < total_rows) {
      const std::int64_t r = onset_row % n_rows;
      if (r >= v0 && r < v0 + n_visible) ++result.injections_per_frame[onset_row / n_rows];
    }

    // Rows g with exposure [g, g + exposure) overlapping [start, stop).
    const auto g_lo = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor(start - exposure)) + 1);
    const auto g_hi = std::min<std::int64_t>(
        total_rows - 1, static_cast<std::int64_t>(std::ceil(stop)) - 1);
    for (std::int64_t g = g_lo; g <= g_hi; ++g) {
      const double overlap = std::min(g + exposure, stop) - std::max<double>(g, start);
      if (overlap <= 0.0) continue;
      const std::int64_t r = g % n_rows;
      if (r < v0 || r >= v0 + n_visible) continue;
      const std::size_t idx = static_cast<std::size_t>(g / n_rows) * n_visible + (r - v0);
      buffer[idx] += laser.irradiance_gain * overlap / exposure;
    }
  }

  result.patterns.resize(static_cast<std::size_t>(config.n_frames));
  for (int k = 0; k < config.n_frames; ++k) {
    auto& p = result.patterns[k];
    p.frame_index = k;
    p.color = laser.color;
    p.intervals = runs_from_rows(
        std::span<const double>(buffer).subspan(static_cast<std::size_t>(k) * n_visible,
                                                n_visible));
    if (!p.intervals.empty()) result.any_visible_hit = true;
  }
  if (!result.any_visible_hit) result.patterns.clear();
  return result;
}

DistortionPattern extract_pattern(const Frame& frame, int channel_threshold,
                                  int expected_width, int expected_height) {
  if (frame.width != expected_width || frame.height != expected_height || !frame.valid()) {
    throw DataError("frame '" + frame.frame_id + "' is " + std::to_string(frame.width) + "x" +
                    std::to_string(frame.height) + ", expected " +
                    std::to_string(expected_width) + "x" + std::to_string(expected_height));
  }
  const double range = 255.0 - channel_threshold;
  std::vector<double> rows(static_cast<std::size_t>(frame.height), 0.0);
  Rgb color_sum{0.0, 0.0, 0.0};
  for (int y = 0; y < frame.height; ++y) {
    int over = 0;
    double excess = 0.0;
    Rgb row_color{0.0, 0.0, 0.0};
    for (int x = 0; x < frame.width; ++x) {
      const std::uint8_t* p = frame.px(x, y);
      const int m = std::max({p[0], p[1], p[2]});
      if (m > channel_threshold) {
        ++over;
        excess += std::min(1.0, (m - channel_threshold) / range);
        for (int c = 0; c < 3; ++c) row_color[c] += p[c];
      }
    }
    if (2 * over >= frame.width) {
      rows[y] = excess / frame.width;
      for (int c = 0; c < 3; ++c) color_sum[c] += row_color[c];
    }
  }
  DistortionPattern out;
  out.intervals = runs_from_rows(rows);
  const double peak = std::max({color_sum[0], color_sum[1], color_sum[2]});
  if (peak > 0.0) {
    for (int c = 0; c < 3; ++c) out.color[c] = color_sum[c] / peak;
  }
  return out;
}

DistortionPattern rescale_pattern(const DistortionPattern& pattern, int from_rows,
                                  int to_rows) {
  if (from_rows < 1 || to_rows < 1) throw ConfigError("row counts must be >= 1");
  if (from_rows == to_rows) return pattern;
  std::vector<double> src(static_cast<std::size_t>(from_rows), 0.0);
  for (const auto& iv : pattern.intervals) {
    for (int i = 0; i < iv.rows(); ++i) src[iv.row_start + i] = iv.intensity[i];
  }
  std::vector<double> dst(static_cast<std::size_t>(to_rows), 0.0);
  const double scale = static_cast<double>(from_rows) / to_rows;
  for (int t = 0; t < to_rows; ++t) {
    const double lo = t * scale;
    const double hi = (t + 1) * scale;
    double acc = 0.0;
    for (int s = static_cast<int>(std::floor(lo)); s < from_rows && s < hi; ++s) {
      const double w = std::min<double>(s + 1, hi) - std::max<double>(s, lo);
      if (w > 0.0) acc += w * src[s];
    }
    dst[t] = acc / scale;
  }
  DistortionPattern out;
  out.frame_index = pattern.frame_index;
  out.color = pattern.color;
  out.intervals = runs_from_rows(dst);
  return out;
}

}  // namespace rollsim
