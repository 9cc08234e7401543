#pragma once

// Procedural street-like scenes used as the bundled fixture corpus. Objects
// are flat-coloured rectangles whose colour encodes their class, so the
// colour-blob detector can find them without a neural network.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rollsim/detection_eval.hpp"
#include "rollsim/frame.hpp"

namespace rollsim {

struct ObjectClass {
  std::string label;
  std::array<std::uint8_t, 3> color;
};

// Class palette shared by the scene generator and the blob detector.
const std::vector<ObjectClass>& object_classes();

struct SceneSpec {
  int width = 320;
  int height = 180;
  int n_frames = 11;
  int n_objects = 6;
  double motion_px_per_frame = 1.0;  // mean object speed
  std::uint64_t seed = 0;
};

struct SceneVideo {
  std::string video_id;
  std::vector<Frame> frames;
  std::vector<BoxSet> truth;  // ground-truth boxes per frame
};

SceneVideo render_scene(const SceneSpec& spec, const std::string& video_id);

// Fixture corpus: `n_videos` videos whose motion speed varies per video.
std::vector<SceneVideo> make_fixture_corpus(int n_videos, int frames_per_video, int width,
                                            int height, std::uint64_t seed);

}  // namespace rollsim
