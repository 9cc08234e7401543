#pragma once

// Frame-pair similarity metrics (SSIM, MS-SSIM, UQI) computed on BT.601
// luma, threshold tamper detection, and ROC-AUC.
//
// Parameters: 11x11 Gaussian window with sigma 1.5, "valid" filtering,
// K1 = 0.01, K2 = 0.03, L = 255. MS-SSIM uses 5 scales with weights
// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333) and 2x2 average downsampling.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rollsim/frame.hpp"

namespace rollsim {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

inline constexpr std::array<double, 5> kMsSsimWeights{0.0448, 0.2856, 0.3001, 0.2363,
                                                      0.1333};

// Single-channel double image.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Plane luma_plane(const Frame& frame);
Plane downsample2(const Plane& p);

double ssim(const Frame& a, const Frame& b, const SsimParams& params = {});
double ssim(const Plane& a, const Plane& b, const SsimParams& params = {});

struct MsSsimResult {
  double value = 1.0;
  int scales_used = 5;
  bool reduced = false;  // fewer than 5 scales fit the frame
};

MsSsimResult ms_ssim_detail(const Plane& a, const Plane& b, const SsimParams& params = {});
double ms_ssim(const Frame& a, const Frame& b, const SsimParams& params = {});

// SSIM with both stabilization constants at zero. Windows whose denominator
// vanishes count as 1 when the two windows are identical and are skipped
// otherwise; if every window is skipped the index is 0.
double uqi(const Frame& a, const Frame& b, const SsimParams& params = {});
double uqi(const Plane& a, const Plane& b, const SsimParams& params = {});

// 1 - clamp(m, 0, 1).
double dissimilarity(double metric_value);

enum class Scenario { kLegit, kRolling, kBlinding };
std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& s);

enum class Metric { kSsim, kMsSsim, kUqi };
inline constexpr std::array<Metric, 3> kAllMetrics{Metric::kSsim, Metric::kMsSsim, Metric::kUqi};
std::string metric_name(Metric m);

struct StealthRecord {
  std::string video_id;
  int pair_index = 0;
  double ssim_d = 0.0;
  double msssim_d = 0.0;
  double uqi_d = 0.0;
  Scenario scenario = Scenario::kLegit;

  double value(Metric m) const;
  bool operator==(const StealthRecord&) const = default;
};

struct FramePair {
  std::string video_id;
  int pair_index = 0;
  Scenario scenario = Scenario::kLegit;
  const Frame* prev = nullptr;
  const Frame* curr = nullptr;
};

StealthRecord measure_pair(const FramePair& pair);

// Records for each pair; pairs with zero dissimilarity under every metric
// (stationary frames) are dropped.
std::vector<StealthRecord> build_records(const std::vector<FramePair>& pairs);

// anomalous iff dissimilarity > threshold. Zero-valued records for the
// chosen metric are excluded from analysis and labelled false.
std::vector<bool> threshold_detector(const std::vector<StealthRecord>& records, Metric metric,
                                     double threshold);

// Probability that a random positive outranks a random negative; ties
// count one half. Throws DataError on an empty class.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

struct AucRow {
  Metric metric;
  Scenario scenario;
  double auc = 0.0;
  double threshold_at_0fpr = 0.0;  // max legit dissimilarity
  double detection_rate_at_0fpr = 0.0;
};

// Per metric and attack scenario: AUC of attack vs legit, and the detection
// rate when the threshold sits at the largest legit value.
std::vector<AucRow> stealth_report(const std::vector<StealthRecord>& records);

std::string records_csv(const std::vector<StealthRecord>& records);
std::string auc_csv(const std::vector<AucRow>& rows);

}  // namespace rollsim
