#pragma once

// Persistence for frames (PNG), box files (JSON lines), pattern sequences,
// manifests and CSV reports.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rollsim/corruption.hpp"
#include "rollsim/detection_eval.hpp"
#include "rollsim/frame.hpp"
#include "rollsim/pattern_synth.hpp"

namespace rollsim {

namespace fs = std::filesystem;

Frame read_png(const fs::path& path);
void write_png(const Frame& frame, const fs::path& path);

struct Corpus {
  fs::path root;
  std::vector<std::string> frame_ids;  // sorted numerically
  int width = 0;
  int height = 0;
  std::string camera_id;
  std::vector<Frame> frames;
};

// Numbered PNGs in `dir`, sorted by number.
std::vector<std::string> list_frame_ids(const fs::path& dir);

// Every k-th id by position: ids[0], ids[k], ids[2k], ...
std::vector<std::string> sample_ids(const std::vector<std::string>& sorted_ids, int every_k);

// Loads every k-th frame. Throws DataError on an empty directory, an
// unreadable file (named in the message) or mixed resolutions.
Corpus load_frames(const fs::path& dir, int every_k);

// Writes frames as %06d.png using the numeric part of each frame id.
void save_frames(const std::vector<Frame>& frames, const fs::path& dir);

std::string frame_file_name(int index);

// Box files: one JSON record per line.
std::string boxes_to_jsonl(const std::vector<BoxSet>& sets);
std::vector<BoxSet> boxes_from_jsonl(const std::string& text);
std::map<std::string, BoxSet> load_boxes(const fs::path& path);
void save_boxes(const std::vector<BoxSet>& sets, const fs::path& path);

std::string pattern_meta_json(const PatternMeta& meta);
std::string blinding_json(const BlindingModel& model);

std::string patterns_to_json(const PatternSequence& seq);
PatternSequence patterns_from_json(const std::string& text);
PatternSequence load_patterns(const fs::path& path);
void save_patterns(const PatternSequence& seq, const fs::path& path);

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace rollsim
