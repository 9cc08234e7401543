#include "rollsim/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rollsim/corpus_io.hpp"
#include "rollsim/errors.hpp"

namespace rollsim {

namespace {

std::uint8_t add_clamped(std::uint8_t v, double delta) {
  const double out = std::min(255.0, v + delta);
  return static_cast<std::uint8_t>(std::lround(out));
}

}  // namespace

void BlindingModel::validate() const {
  if (!(peak_intensity >= 0.0 && peak_intensity <= 1.0)) {
    throw ConfigError("blinding.peak_intensity must be in [0, 1]");
  }
  if (!(falloff_radius > 0.0)) throw ConfigError("blinding.falloff_radius must be > 0");
  for (double c : color) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("blinding.color components must be in [0, 1]");
  }
}

Frame overlay(const Frame& frame, const DistortionPattern& pattern) {
  pattern.validate(frame.height);
  Frame out = frame;
  for (const auto& iv : pattern.intervals) {
    for (int y = iv.row_start; y <= iv.row_end; ++y) {
      const double a = iv.intensity[y - iv.row_start];
      if (a <= 0.0) continue;
      const double add[3] = {a * 255.0 * pattern.color[0], a * 255.0 * pattern.color[1],
                             a * 255.0 * pattern.color[2]};
      auto row = out.row(y);
      for (std::size_t i = 0; i < row.size(); i += 3) {
        for (int c = 0; c < 3; ++c) row[i + c] = add_clamped(row[i + c], add[c]);
      }
    }
  }
  return out;
}

Frame blind(const Frame& frame, const BlindingModel& model) {
  model.validate();
  Frame out = frame;
  if (model.peak_intensity == 0.0) return out;
  const double inv_r2 = 1.0 / (model.falloff_radius * model.falloff_radius);
  for (int y = 0; y < frame.height; ++y) {
    const double dy = (y + 0.5) / frame.height - model.center_y;
    for (int x = 0; x < frame.width; ++x) {
      const double dx = (x + 0.5) / frame.width - model.center_x;
      const double g = std::exp(-(dx * dx + dy * dy) * inv_r2);
      std::uint8_t* p = out.px(x, y);
      for (int c = 0; c < 3; ++c) {
        p[c] = add_clamped(p[c], model.peak_intensity * 255.0 * model.color[c] * g);
      }
    }
  }
  return out;
}

CorruptedCorpus corrupt_corpus(const std::vector<Frame>& frames, const AttackSource& source,
                               int every_k, std::uint64_t seed) {
  if (frames.empty()) throw DataError("corpus is empty");
  if (every_k < 1) throw ConfigError("every_k must be >= 1");

  CorruptedCorpus out;
  out.manifest.seed = seed;
  out.manifest.every_k = every_k;

  std::mt19937_64 rng(seed);
  if (const auto* seq = std::get_if<PatternSequence>(&source)) {
    out.manifest.attack = "rolling";
    out.manifest.parameters_json = pattern_meta_json(seq->meta);
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < seq->frames.size(); ++i) {
      if (!seq->frames[i].empty()) usable.push_back(i);
    }
    if (usable.empty()) throw DataError("pattern sequence has no non-empty patterns");
    const int rows = seq->meta.camera.n_rows_visible;
    for (std::size_t f = 0; f < frames.size(); f += every_k) {
      const Frame& frame = frames[f];
      if (frame.height != rows) {
        throw DataError("frame '" + frame.frame_id + "' has " + std::to_string(frame.height) +
                        " rows but patterns were made for " + std::to_string(rows));
      }
      const std::size_t pick = usable[rng() % usable.size()];
      Frame corrupted = overlay(frame, seq->frames[pick]);
      out.manifest.entries.push_back(
          {frame.frame_id, std::to_string(pick), seq->frames[pick].frame_index});
      out.frames.push_back(std::move(corrupted));
    }
  } else {
    const auto& model = std::get<BlindingModel>(source);
    model.validate();
    out.manifest.attack = "blinding";
    out.manifest.parameters_json = blinding_json(model);
    for (std::size_t f = 0; f < frames.size(); f += every_k) {
      out.frames.push_back(blind(frames[f], model));
      out.manifest.entries.push_back({frames[f].frame_id, "blinding", -1});
    }
  }
  return out;
}

}  // namespace rollsim
