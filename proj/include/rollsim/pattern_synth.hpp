#pragma once

// Distortion pattern synthesis: a laser pulse train simulated against the
// rolling readout on a global timeline, plus pattern extraction from frames.

#include <cstdint>
#include <string>
#include <vector>

#include "rollsim/frame.hpp"
#include "rollsim/sensor_timing.hpp"

namespace rollsim {

struct RowInterval {
  int row_start = 0;
  int row_end = 0;  // inclusive
  std::vector<double> intensity;  // one entry per row

  int rows() const { return row_end - row_start + 1; }
  double centroid() const;  // intensity-weighted row
  bool operator==(const RowInterval&) const = default;
};

struct DistortionPattern {
  int frame_index = 0;
  Rgb color{0.0, 0.0, 0.0};
  std::vector<RowInterval> intervals;  // sorted, non-overlapping

  bool empty() const { return intervals.empty(); }
  // Intensity-weighted mean row over all intervals; -1 for an empty pattern.
  double centroid() const;
  // Throws DataError when the intervals break the ordering/extent invariants.
  void validate(int n_visible) const;
  bool operator==(const DistortionPattern&) const = default;
};

enum class DeadAreaLayout { kTrailingBlock, kLeadingBlock, kSplit };

DeadAreaLayout parse_layout(const std::string& name);
std::string layout_name(DeadAreaLayout layout);

// First sensor row that is emitted as visible row 0.
int first_visible_row(const CameraSpec& spec, DeadAreaLayout layout);

struct TimelineConfig {
  CameraSpec spec;
  LaserConfig laser;
  EnvConditions env;
  int n_frames = 1;
  DeadAreaLayout dead_area_layout = DeadAreaLayout::kTrailingBlock;
  std::uint64_t seed = 0;
  // When false the laser phase is drawn from the seed, uniformly over one
  // laser period.
  bool explicit_phase = false;

  void validate() const;
};

struct SynthesisResult {
  std::vector<DistortionPattern> patterns;  // one per frame
  // Pulses whose onset fell while a visible row was being reset, per frame.
  std::vector<int> injections_per_frame;
  double phase_s = 0.0;  // laser phase actually used
  bool any_visible_hit = false;
};

// Empty `patterns` with any_visible_hit == false signals that no pulse
// reached a visible row.
SynthesisResult synthesize(const TimelineConfig& config);

// Rows where at least half the pixels exceed `channel_threshold` in some
// channel become intervals; intensity is the row's mean normalized excess.
DistortionPattern extract_pattern(const Frame& frame, int channel_threshold,
                                  int expected_width, int expected_height);

// Resample a pattern to a different visible-row count by area averaging.
DistortionPattern rescale_pattern(const DistortionPattern& pattern, int from_rows,
                                  int to_rows);

struct PatternMeta {
  CameraSpec camera;
  LaserConfig laser;
  EnvConditions env;
  std::uint64_t seed = 0;
  DeadAreaLayout layout = DeadAreaLayout::kTrailingBlock;
};

struct PatternSequence {
  PatternMeta meta;
  std::vector<DistortionPattern> frames;
};

}  // namespace rollsim
