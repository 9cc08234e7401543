#include "rollsim/corpus_io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rollsim/errors.hpp"

namespace rollsim {

using json = nlohmann::ordered_json;

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read PNG '" + path.string() + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  Frame frame(static_cast<int>(image.width), static_cast<int>(image.height),
              path.stem().string());
  if (!png_image_finish_read(&image, nullptr, frame.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DataError("cannot decode PNG '" + path.string() + "': " + msg);
  }
  return frame;
}

void write_png(const Frame& frame, const fs::path& path) {
  if (!frame.valid()) throw DataError("refusing to write invalid frame '" + frame.frame_id + "'");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width);
  image.height = static_cast<png_uint_32>(frame.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, frame.pixels.data(), 0, nullptr)) {
    throw DataError("cannot write PNG '" + path.string() + "': " + image.message);
  }
}

namespace {

bool parse_index(const std::string& stem, long long& out) {
  if (stem.empty()) return false;
  const char* end = stem.data() + stem.size();
  auto [ptr, ec] = std::from_chars(stem.data(), end, out);
  return ec == std::errc() && ptr == end && out >= 0;
}

}  // namespace

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.png", index);
  return buf;
}

std::vector<std::string> list_frame_ids(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: '" + dir.string() + "'");
  std::vector<std::pair<long long, std::string>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    const std::string stem = entry.path().stem().string();
    long long index = 0;
    if (!parse_index(stem, index)) {
      throw DataError("frame file name is not numeric: '" + entry.path().string() + "'");
    }
    found.emplace_back(index, stem);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> ids;
  for (auto& [_, stem] : found) ids.push_back(std::move(stem));
  return ids;
}

std::vector<std::string> sample_ids(const std::vector<std::string>& sorted_ids, int every_k) {
  if (every_k < 1) throw ConfigError("every_k must be >= 1");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sorted_ids.size(); i += every_k) out.push_back(sorted_ids[i]);
  return out;
}

Corpus load_frames(const fs::path& dir, int every_k) {
  Corpus corpus;
  corpus.root = dir;
  const auto ids = list_frame_ids(dir);
  if (ids.empty()) throw DataError("no PNG frames in '" + dir.string() + "'");
  corpus.frame_ids = sample_ids(ids, every_k);
  for (const auto& id : corpus.frame_ids) {
    Frame f = read_png(dir / (id + ".png"));
    if (corpus.frames.empty()) {
      corpus.width = f.width;
      corpus.height = f.height;
    } else if (f.width != corpus.width || f.height != corpus.height) {
      throw DataError("resolution mismatch: '" + id + ".png' is " + std::to_string(f.width) +
                      "x" + std::to_string(f.height) + ", corpus is " +
                      std::to_string(corpus.width) + "x" + std::to_string(corpus.height));
    }
    corpus.frames.push_back(std::move(f));
  }
  corpus.camera_id = dir.filename().string();
  return corpus;
}

void save_frames(const std::vector<Frame>& frames, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    long long index = static_cast<long long>(i);
    parse_index(frames[i].frame_id, index);
    write_png(frames[i], dir / frame_file_name(static_cast<int>(index)));
  }
}

// ---- box files ------------------------------------------------------------

std::string boxes_to_jsonl(const std::vector<BoxSet>& sets) {
  std::string out;
  for (const auto& set : sets) {
    json rec;
    rec["frame_id"] = set.frame_id;
    rec["boxes"] = json::array();
    for (const auto& b : set.boxes) {
      rec["boxes"].push_back({{"x1", b.x1},
                              {"y1", b.y1},
                              {"x2", b.x2},
                              {"y2", b.y2},
                              {"class", b.class_label},
                              {"score", b.score}});
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

namespace {

[[noreturn]] void schema_error(std::size_t line, const std::string& field,
                               const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + field + ": " + what);
}

double number_field(const json& obj, const char* key, std::size_t line,
                    const std::string& prefix) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(line, prefix + key, "missing");
  if (!it->is_number()) schema_error(line, prefix + key, "must be a number");
  return it->get<double>();
}

}  // namespace

std::vector<BoxSet> boxes_from_jsonl(const std::string& text) {
  std::vector<BoxSet> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      schema_error(line_no, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) schema_error(line_no, "<record>", "must be an object");
    BoxSet set;
    const auto fid = rec.find("frame_id");
    if (fid == rec.end() || !fid->is_string()) {
      schema_error(line_no, "frame_id", "missing or not a string");
    }
    set.frame_id = fid->get<std::string>();
    const auto boxes = rec.find("boxes");
    if (boxes == rec.end() || !boxes->is_array()) {
      schema_error(line_no, "boxes", "missing or not an array");
    }
    for (std::size_t i = 0; i < boxes->size(); ++i) {
      const json& b = (*boxes)[i];
      const std::string prefix = "boxes[" + std::to_string(i) + "].";
      if (!b.is_object()) schema_error(line_no, "boxes[" + std::to_string(i) + "]", "must be an object");
      DetectionBox box;
      box.x1 = number_field(b, "x1", line_no, prefix);
      box.y1 = number_field(b, "y1", line_no, prefix);
      box.x2 = number_field(b, "x2", line_no, prefix);
      box.y2 = number_field(b, "y2", line_no, prefix);
      box.score = number_field(b, "score", line_no, prefix);
      const auto cls = b.find("class");
      if (cls == b.end() || !cls->is_string()) schema_error(line_no, prefix + "class", "missing or not a string");
      box.class_label = cls->get<std::string>();
      if (!(box.x2 > box.x1)) schema_error(line_no, prefix + "x2", "must be greater than x1");
      if (!(box.y2 > box.y1)) schema_error(line_no, prefix + "y2", "must be greater than y1");
      if (!(box.score >= 0.0 && box.score <= 1.0)) schema_error(line_no, prefix + "score", "must be in [0, 1]");
      set.boxes.push_back(std::move(box));
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::map<std::string, BoxSet> load_boxes(const fs::path& path) {
  std::map<std::string, BoxSet> out;
  for (auto& set : boxes_from_jsonl(read_text_file(path))) {
    if (out.count(set.frame_id)) throw DataError("duplicate frame_id '" + set.frame_id + "' in " + path.string());
    std::string id = set.frame_id;
    out.emplace(std::move(id), std::move(set));
  }
  return out;
}

void save_boxes(const std::vector<BoxSet>& sets, const fs::path& path) {
  write_text_file(path, boxes_to_jsonl(sets));
}

// ---- pattern files ----------------------------------------------------------

namespace {

json camera_to_json(const CameraSpec& c) {
  json j;
  j["frame_rate"] = c.frame_rate;
  j["n_rows_total"] = c.n_rows_total;
  j["n_rows_visible"] = c.n_rows_visible;
  j["min_luminous_exposure"] =
      c.min_luminous_exposure ? json(*c.min_luminous_exposure) : json(nullptr);
  j["exposure_range"] = c.exposure_range
                            ? json::array({c.exposure_range->min_us, c.exposure_range->max_us})
                            : json(nullptr);
  j["reset_interval_us"] = c.reset_interval_us ? json(*c.reset_interval_us) : json(nullptr);
  return j;
}

json rgb_to_json(const Rgb& c) { return json::array({c[0], c[1], c[2]}); }

json laser_to_json(const LaserConfig& l) {
  json j;
  j["frequency_hz"] = l.frequency_hz;
  j["duty_cycle"] = l.duty_cycle;
  j["phase_s"] = l.phase_s;
  j["color"] = rgb_to_json(l.color);
  j["irradiance_gain"] = l.irradiance_gain;
  return j;
}

json env_to_json(const EnvConditions& e) {
  json j;
  j["illuminance_lux"] = e.illuminance_lux;
  j["exposure_us"] = e.exposure_us;
  return j;
}

json meta_to_json(const PatternMeta& m) {
  json j;
  j["camera"] = camera_to_json(m.camera);
  j["laser"] = laser_to_json(m.laser);
  j["env"] = env_to_json(m.env);
  j["seed"] = m.seed;
  j["dead_area_layout"] = layout_name(m.layout);
  return j;
}

// Field access that reports the JSON path on failure.
const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw DataError(path + ": must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(path + "." + key + ": missing");
  return *it;
}

double need_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = need(obj, key, path);
  if (!v.is_number()) throw DataError(path + "." + key + ": must be a number");
  return v.get<double>();
}

Rgb rgb_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw DataError(path + ": must be [r, g, b]");
  Rgb c{};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw DataError(path + ": must be numeric");
    c[i] = j[i].get<double>();
  }
  return c;
}

CameraSpec camera_from_json(const json& j, const std::string& path) {
  CameraSpec c;
  c.frame_rate = need_number(j, "frame_rate", path);
  c.n_rows_total = static_cast<int>(need_number(j, "n_rows_total", path));
  c.n_rows_visible = static_cast<int>(need_number(j, "n_rows_visible", path));
  if (const auto& h = need(j, "min_luminous_exposure", path); !h.is_null()) {
    c.min_luminous_exposure = h.get<double>();
  }
  if (const auto& r = need(j, "exposure_range", path); !r.is_null()) {
    if (!r.is_array() || r.size() != 2) throw DataError(path + ".exposure_range: must be [min, max]");
    c.exposure_range = ExposureRange{r[0].get<double>(), r[1].get<double>()};
  }
  if (const auto& d = need(j, "reset_interval_us", path); !d.is_null()) {
    c.reset_interval_us = d.get<double>();
  }
  return c;
}

LaserConfig laser_from_json(const json& j, const std::string& path) {
  LaserConfig l;
  l.frequency_hz = need_number(j, "frequency_hz", path);
  l.duty_cycle = need_number(j, "duty_cycle", path);
  l.phase_s = need_number(j, "phase_s", path);
  l.color = rgb_from_json(need(j, "color", path), path + ".color");
  l.irradiance_gain = need_number(j, "irradiance_gain", path);
  return l;
}

EnvConditions env_from_json(const json& j, const std::string& path) {
  EnvConditions e;
  e.illuminance_lux = need_number(j, "illuminance_lux", path);
  e.exposure_us = need_number(j, "exposure_us", path);
  return e;
}

}  // namespace

std::string pattern_meta_json(const PatternMeta& meta) { return meta_to_json(meta).dump(); }

std::string blinding_json(const BlindingModel& m) {
  json j;
  j["center"] = json::array({m.center_x, m.center_y});
  j["peak_intensity"] = m.peak_intensity;
  j["falloff_radius"] = m.falloff_radius;
  j["color"] = rgb_to_json(m.color);
  return j.dump();
}

std::string patterns_to_json(const PatternSequence& seq) {
  json doc;
  doc["meta"] = meta_to_json(seq.meta);
  doc["frames"] = json::array();
  for (const auto& p : seq.frames) {
    json f;
    f["frame_index"] = p.frame_index;
    f["color"] = rgb_to_json(p.color);
    f["intervals"] = json::array();
    for (const auto& iv : p.intervals) {
      f["intervals"].push_back(
          {{"start", iv.row_start}, {"end", iv.row_end}, {"intensity", iv.intensity}});
    }
    doc["frames"].push_back(std::move(f));
  }
  return doc.dump(1) + "\n";
}

PatternSequence patterns_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("pattern file is not valid JSON: ") + e.what());
  }
  PatternSequence seq;
  const json& meta = need(doc, "meta", "$");
  seq.meta.camera = camera_from_json(need(meta, "camera", "$.meta"), "$.meta.camera");
  seq.meta.laser = laser_from_json(need(meta, "laser", "$.meta"), "$.meta.laser");
  seq.meta.env = env_from_json(need(meta, "env", "$.meta"), "$.meta.env");
  const json& seed = need(meta, "seed", "$.meta");
  if (!seed.is_number_unsigned()) throw DataError("$.meta.seed: must be a non-negative integer");
  seq.meta.seed = seed.get<std::uint64_t>();
  if (const auto it = meta.find("dead_area_layout"); it != meta.end()) {
    seq.meta.layout = parse_layout(it->get<std::string>());
  }
  const json& frames = need(doc, "frames", "$");
  if (!frames.is_array()) throw DataError("$.frames: must be an array");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string path = "$.frames[" + std::to_string(i) + "]";
    const json& f = frames[i];
    DistortionPattern p;
    p.frame_index = static_cast<int>(need_number(f, "frame_index", path));
    p.color = rgb_from_json(need(f, "color", path), path + ".color");
    const json& ivs = need(f, "intervals", path);
    if (!ivs.is_array()) throw DataError(path + ".intervals: must be an array");
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const std::string ipath = path + ".intervals[" + std::to_string(k) + "]";
      RowInterval iv;
      iv.row_start = static_cast<int>(need_number(ivs[k], "start", ipath));
      iv.row_end = static_cast<int>(need_number(ivs[k], "end", ipath));
      const json& inten = need(ivs[k], "intensity", ipath);
      if (!inten.is_array()) throw DataError(ipath + ".intensity: must be an array");
      iv.intensity = inten.get<std::vector<double>>();
      p.intervals.push_back(std::move(iv));
    }
    p.validate(seq.meta.camera.n_rows_visible);
    seq.frames.push_back(std::move(p));
  }
  return seq;
}

PatternSequence load_patterns(const fs::path& path) {
  return patterns_from_json(read_text_file(path));
}

void save_patterns(const PatternSequence& seq, const fs::path& path) {
  write_text_file(path, patterns_to_json(seq));
}

// ---- manifests ----------------------------------------------------------------

std::string manifest_to_json(const Manifest& m) {
  json doc;
  doc["attack"] = m.attack;
  doc["seed"] = m.seed;
  doc["every_k"] = m.every_k;
  doc["parameters"] = m.parameters_json.empty() ? json::object() : json::parse(m.parameters_json);
  doc["entries"] = json::array();
  for (const auto& e : m.entries) {
    doc["entries"].push_back({{"frame_id", e.frame_id},
                              {"pattern_id", e.pattern_id},
                              {"source_frame_index", e.source_frame_index}});
  }
  return doc.dump(1) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  m.attack = need(doc, "attack", "$").get<std::string>();
  m.seed = need(doc, "seed", "$").get<std::uint64_t>();
  m.every_k = need(doc, "every_k", "$").get<int>();
  m.parameters_json = need(doc, "parameters", "$").dump();
  const json& entries = need(doc, "entries", "$");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = "$.entries[" + std::to_string(i) + "]";
    ManifestEntry e;
    e.frame_id = need(entries[i], "frame_id", path).get<std::string>();
    e.pattern_id = need(entries[i], "pattern_id", path).get<std::string>();
    e.source_frame_index = need(entries[i], "source_frame_index", path).get<int>();
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace rollsim
