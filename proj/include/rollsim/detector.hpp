#pragma once

// Sources of detection boxes for the sweep: a built-in colour-blob detector
// for the synthetic fixture corpus, and a bridge that shells out to an
// external detector producing box files in the JSON-lines interchange format.

#include <memory>
#include <string>
#include <vector>

#include "rollsim/detection_eval.hpp"
#include "rollsim/frame.hpp"

namespace rollsim {

class Detector {
 public:
  virtual ~Detector() = default;
  // One BoxSet per input frame, in input order, frame_id copied from the frame.
  virtual std::vector<BoxSet> detect(const std::vector<Frame>& frames) const = 0;
  virtual std::string name() const = 0;
};

struct BlobDetectorParams {
  int color_tolerance = 40;  // max per-channel distance to the class colour
  int min_area = 24;         // pixels
};

// Connected components (4-neighbour) of pixels close to a class colour.
// Score is the fill ratio of the component within its bounding box.
class ColorBlobDetector : public Detector {
 public:
  explicit ColorBlobDetector(BlobDetectorParams params = {}) : params_(params) {}
  std::vector<BoxSet> detect(const std::vector<Frame>& frames) const override;
  BoxSet detect_one(const Frame& frame) const;
  std::string name() const override { return "blob"; }

 private:
  BlobDetectorParams params_;
};

// Runs `command` after substituting {frames} (a directory of %06d.png files
// written for the call) and {out} (the box file the command must write).
class ExternalDetector : public Detector {
 public:
  explicit ExternalDetector(std::string command) : command_(std::move(command)) {}
  std::vector<BoxSet> detect(const std::vector<Frame>& frames) const override;
  std::string name() const override { return "external"; }

 private:
  std::string command_;
};

std::unique_ptr<Detector> make_detector(const std::string& kind, const std::string& command);

}  // namespace rollsim
