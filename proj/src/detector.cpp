#include "rollsim/detector.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <unistd.h>

#include "rollsim/corpus_io.hpp"
#include "rollsim/errors.hpp"
#include "rollsim/scene.hpp"

namespace rollsim {

BoxSet ColorBlobDetector::detect_one(const Frame& frame) const {
  BoxSet out;
  out.frame_id = frame.frame_id;
  const int w = frame.width;
  const int h = frame.height;
  const auto& classes = object_classes();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* p = frame.px(x, y);
      for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& ref = classes[c].color;
        bool match = true;
        for (int k = 0; k < 3 && match; ++k) {
          match = std::abs(static_cast<int>(p[k]) - ref[k]) <= params_.color_tolerance;
        }
        if (match) {
          label[static_cast<std::size_t>(y) * w + x] = static_cast<int>(c);
          break;
        }
      }
    }
  }

  std::vector<bool> seen(label.size(), false);
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t start = static_cast<std::size_t>(y) * w + x;
      if (label[start] < 0 || seen[start]) continue;
      const int cls = label[start];
      int min_x = x, max_x = x, min_y = y, max_y = y, count = 0;
      stack.assign(1, static_cast<int>(start));
      seen[start] = true;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int cx = idx % w;
        const int cy = idx / w;
        ++count;
        min_x = std::min(min_x, cx);
        max_x = std::max(max_x, cx);
        min_y = std::min(min_y, cy);
        max_y = std::max(max_y, cy);
        const int nx[4] = {cx - 1, cx + 1, cx, cx};
        const int ny[4] = {cy, cy, cy - 1, cy + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
          const std::size_t n = static_cast<std::size_t>(ny[k]) * w + nx[k];
          if (!seen[n] && label[n] == cls) {
            seen[n] = true;
            stack.push_back(static_cast<int>(n));
          }
        }
      }
      if (count < params_.min_area) continue;
      const double box_area = static_cast<double>(max_x - min_x + 1) * (max_y - min_y + 1);
      out.boxes.push_back({static_cast<double>(min_x), static_cast<double>(min_y),
                           static_cast<double>(max_x + 1), static_cast<double>(max_y + 1),
                           classes[cls].label, std::min(1.0, count / box_area)});
    }
  }
  return out;
}

std::vector<BoxSet> ColorBlobDetector::detect(const std::vector<Frame>& frames) const {
  std::vector<BoxSet> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(detect_one(f));
  return out;
}

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

}  // namespace

std::vector<BoxSet> ExternalDetector::detect(const std::vector<Frame>& frames) const {
  static std::atomic<int> counter{0};
  const fs::path work = fs::temp_directory_path() /
                        ("rollsim-detect-" + std::to_string(::getpid()) + "-" +
                         std::to_string(counter++));
  fs::create_directories(work / "frames");
  std::vector<Frame> renamed = frames;
  for (std::size_t i = 0; i < renamed.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "%06zu", i);
    renamed[i].frame_id = id;
  }
  save_frames(renamed, work / "frames");
  const fs::path out_file = work / "boxes.jsonl";
  std::string cmd = replace_all(command_, "{frames}", (work / "frames").string());
  cmd = replace_all(cmd, "{out}", out_file.string());
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    fs::remove_all(work);
    throw DataError("detector command failed (" + std::to_string(rc) + "): " + cmd);
  }
  auto by_id = load_boxes(out_file);
  fs::remove_all(work);
  std::vector<BoxSet> out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    BoxSet set;
    if (auto it = by_id.find(renamed[i].frame_id); it != by_id.end()) set = it->second;
    set.frame_id = frames[i].frame_id;
    out.push_back(std::move(set));
  }
  return out;
}

std::unique_ptr<Detector> make_detector(const std::string& kind, const std::string& command) {
  if (kind == "blob") return std::make_unique<ColorBlobDetector>();
  if (kind == "external") {
    if (command.empty()) throw ConfigError("detector.command is required for an external detector");
    return std::make_unique<ExternalDetector>(command);
  }
  throw ConfigError("unknown detector kind '" + kind + "'");
}

}  // namespace rollsim
