#pragma once

// Attack outcome categorization from detector outputs on original and
// corrupted frames.

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace rollsim {

struct DetectionBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;
  std::string class_label;
  double score = 1.0;

  double area() const { return (x2 - x1) * (y2 - y1); }
  bool valid() const {
    return x1 < x2 && y1 < y2 && score >= 0.0 && score <= 1.0;
  }
  bool operator==(const DetectionBox&) const = default;
};

struct BoxSet {
  std::string frame_id;
  std::vector<DetectionBox> boxes;
  bool operator==(const BoxSet&) const = default;
};

inline constexpr double kExistenceIou = 0.5;
inline constexpr double kPlacementIou = 0.95;
inline constexpr double kDefaultScoreThreshold = 0.5;

double iou(const DetectionBox& a, const DetectionBox& b);

// Boxes with score >= threshold.
BoxSet admit(const BoxSet& set, double score_threshold);

enum class BoxOutcome { kUnaltered, kHidden, kMisplaced };

struct FrameOutcome {
  std::string frame_id;
  int n_original = 0;
  int n_corrupted = 0;
  int hidden = 0;
  int misplaced = 0;
  int unaltered = 0;
  int appeared = 0;
  std::vector<BoxOutcome> per_original;
  std::vector<bool> per_corrupted_appeared;
};

// Non-exclusive max-IoU matching. An original box is hidden when no
// corrupted box of the same class overlaps it with IoU > 0.5; otherwise it
// is misplaced when that best same-class IoU is below 0.95. A corrupted box
// has appeared when no original box overlaps it with IoU > 0.5.
FrameOutcome categorize(const BoxSet& original, const BoxSet& corrupted);

struct ParamTuple {
  double f_hz = 0.0;
  double t_exp_us = 0.0;
  double t_on_us = 0.0;
  auto operator<=>(const ParamTuple&) const = default;
};

struct OutcomeReport {
  ParamTuple params;
  std::string group;  // e.g. video id
  int n_original = 0;
  int n_corrupted = 0;
  int hidden = 0;
  int misplaced = 0;
  int unaltered = 0;
  int appeared = 0;
  std::vector<FrameOutcome> frames;

  void add(FrameOutcome frame);
  double hidden_fraction() const;
  double misplaced_fraction() const;
  double unaltered_fraction() const;
  // Fraction of corrupted-frame boxes that appeared.
  double appeared_fraction() const;
};

struct SummaryRow {
  ParamTuple params;
  int n_reports = 0;
  double hidden = 0.0;
  double misplaced = 0.0;
  double appeared = 0.0;
  double hidden_std = 0.0;
  double misplaced_std = 0.0;
  double appeared_std = 0.0;
};

// Mean and population standard deviation of per-report fractions, grouped by
// parameter tuple, in ascending tuple order.
std::vector<SummaryRow> aggregate(const std::vector<OutcomeReport>& reports);

std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace rollsim
