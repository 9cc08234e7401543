#pragma once

// End-to-end runs shared by the CLI and the integration tests: planning,
// pattern synthesis, parameter sweeps and stealth comparisons.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rollsim/detection_eval.hpp"
#include "rollsim/detector.hpp"
#include "rollsim/pattern_synth.hpp"
#include "rollsim/run_config.hpp"
#include "rollsim/stealth_metrics.hpp"

namespace rollsim {

// Runs fn(0..n-1) on up to `jobs` threads. The exception from the lowest
// failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Stable 64-bit mix of a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct PlanReport {
  double delta_t_rst_us = 0.0;
  double t_on_us = 0.0;
  double t_exp_us = 0.0;
  std::string t_exp_source;  // "config", "estimated" or "estimated (clamped)"
  TimingPlan timing;
  SurfaceResult surface;

  std::string text() const;
};

PlanReport run_plan(const RunConfig& cfg);

PatternSequence run_synth(const RunConfig& cfg, int n_frames);

struct Video {
  std::string video_id;
  std::vector<Frame> frames;
};

// Subdirectories of `root` are videos; a root holding PNGs directly is one
// video named after the directory.
std::vector<Video> load_videos(const std::filesystem::path& root, int every_k);

struct SweepPoint {
  ParamTuple params;
  double duty_cycle = 0.0;
};

std::vector<SweepPoint> sweep_points(const SweepAxes& axes);

// Up to `count` distinct non-empty patterns drawn with a seeded shuffle.
std::vector<DistortionPattern> pick_patterns(const SynthesisResult& synth, int count,
                                             std::uint64_t seed);

struct SweepRecord {
  ParamTuple params;
  StealthRecord record;
};

struct SweepResult {
  std::vector<OutcomeReport> reports;  // tuple-major, then video order
  std::vector<SummaryRow> summary;
  std::vector<SweepRecord> stealth;

  std::string summary_csv() const;
  std::string reports_csv() const;
  std::string stealth_csv() const;
};

SweepResult run_sweep(const RunConfig& cfg, const std::vector<Video>& videos,
                      const Detector& detector, int jobs);

// Pair indices i (pairing frame i-1 with frame i), evenly spaced over the
// video.
std::vector<int> pair_indices(int n_frames, int n_pairs);

struct StealthInput {
  std::vector<Video> videos;
  std::vector<DistortionPattern> patterns;  // rolling-shutter pool, rows = frame height
  BlindingModel blinding;
  int pairs_per_video = 10;
  std::uint64_t seed = 0;
};

std::vector<StealthRecord> run_stealth(const StealthInput& input, int jobs);

// Pattern pool over every sweep point, rescaled to `target_rows`.
std::vector<DistortionPattern> pattern_pool(const RunConfig& cfg, int per_config,
                                            int target_rows);

}  // namespace rollsim
