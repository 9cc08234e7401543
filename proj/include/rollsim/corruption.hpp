#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rollsim/frame.hpp"
#include "rollsim/pattern_synth.hpp"

namespace rollsim {

// Additive illumination with a Gaussian falloff around a single point.
struct BlindingModel {
  double center_x = 0.5;  // fraction of frame width
  double center_y = 0.5;  // fraction of frame height
  double peak_intensity = 1.0;
  double falloff_radius = 0.75;  // fraction; distances are normalized per axis
  Rgb color{1.0, 1.0, 1.0};  // bright white light saturating the sensor

  void validate() const;
};

// out = clamp(in + a * 255 * color) on every pixel of each affected row.
Frame overlay(const Frame& frame, const DistortionPattern& pattern);

// out = clamp(in + peak * 255 * color * exp(-(d / radius)^2)).
Frame blind(const Frame& frame, const BlindingModel& model);

struct ManifestEntry {
  std::string frame_id;
  std::string pattern_id;  // "<index>" into the pattern sequence, or "blinding"
  int source_frame_index = -1;  // pattern's frame_index, -1 for blinding
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::uint64_t seed = 0;
  int every_k = 1;
  std::string attack;  // "rolling" or "blinding"
  // Parameters of the attack: pattern sequence meta or blinding model.
  std::string parameters_json;
  std::vector<ManifestEntry> entries;
  bool operator==(const Manifest&) const = default;
};

struct CorruptedCorpus {
  std::vector<Frame> frames;
  Manifest manifest;
};

using AttackSource = std::variant<PatternSequence, BlindingModel>;

// Takes every k-th frame (0, k, 2k, ...) and corrupts it. With a pattern
// sequence each frame receives a pattern drawn with replacement from the
// seeded generator. Empty patterns are never drawn.
CorruptedCorpus corrupt_corpus(const std::vector<Frame>& frames, const AttackSource& source,
                               int every_k, std::uint64_t seed);

}  // namespace rollsim
