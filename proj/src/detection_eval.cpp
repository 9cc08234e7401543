#include "rollsim/detection_eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rollsim/errors.hpp"

namespace rollsim {

double iou(const DetectionBox& a, const DetectionBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

BoxSet admit(const BoxSet& set, double score_threshold) {
  BoxSet out;
  out.frame_id = set.frame_id;
  for (const auto& b : set.boxes) {
    if (b.score >= score_threshold) out.boxes.push_back(b);
  }
  return out;
}

FrameOutcome categorize(const BoxSet& original, const BoxSet& corrupted) {
  FrameOutcome out;
  out.frame_id = original.frame_id;
  out.n_original = static_cast<int>(original.boxes.size());
  out.n_corrupted = static_cast<int>(corrupted.boxes.size());

  for (const auto& o : original.boxes) {
    double best_same = 0.0;
    for (const auto& c : corrupted.boxes) {
      if (c.class_label == o.class_label) best_same = std::max(best_same, iou(o, c));
    }
    BoxOutcome outcome;
    if (best_same <= kExistenceIou) {
      outcome = BoxOutcome::kHidden;
      ++out.hidden;
    } else if (best_same < kPlacementIou) {
      outcome = BoxOutcome::kMisplaced;
      ++out.misplaced;
    } else {
      outcome = BoxOutcome::kUnaltered;
      ++out.unaltered;
    }
    out.per_original.push_back(outcome);
  }

  for (const auto& c : corrupted.boxes) {
    double best = 0.0;
    for (const auto& o : original.boxes) best = std::max(best, iou(c, o));
    const bool appeared = best <= kExistenceIou;
    if (appeared) ++out.appeared;
    out.per_corrupted_appeared.push_back(appeared);
  }
  return out;
}

void OutcomeReport::add(FrameOutcome frame) {
  n_original += frame.n_original;
  n_corrupted += frame.n_corrupted;
  hidden += frame.hidden;
  misplaced += frame.misplaced;
  unaltered += frame.unaltered;
  appeared += frame.appeared;
  frames.push_back(std::move(frame));
}

namespace {
double ratio(int num, int den) { return den > 0 ? static_cast<double>(num) / den : 0.0; }
}  // namespace

double OutcomeReport::hidden_fraction() const { return ratio(hidden, n_original); }
double OutcomeReport::misplaced_fraction() const { return ratio(misplaced, n_original); }
double OutcomeReport::unaltered_fraction() const { return ratio(unaltered, n_original); }
double OutcomeReport::appeared_fraction() const { return ratio(appeared, n_corrupted); }

std::vector<SummaryRow> aggregate(const std::vector<OutcomeReport>& reports) {
  if (reports.empty()) throw DataError("aggregate needs at least one report");
  std::map<ParamTuple, std::vector<const OutcomeReport*>> groups;
  for (const auto& r : reports) groups[r.params].push_back(&r);

  auto mean_std = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(var / v.size())};
  };

  std::vector<SummaryRow> out;
  for (const auto& [params, members] : groups) {
    std::vector<double> h, m, a;
    for (const auto* r : members) {
      h.push_back(r->hidden_fraction());
      m.push_back(r->misplaced_fraction());
      a.push_back(r->appeared_fraction());
    }
    SummaryRow row;
    row.params = params;
    row.n_reports = static_cast<int>(members.size());
    std::tie(row.hidden, row.hidden_std) = mean_std(h);
    std::tie(row.misplaced, row.misplaced_std) = mean_std(m);
    std::tie(row.appeared, row.appeared_std) = mean_std(a);
    out.push_back(row);
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "f_hz,t_exp_us,t_on_us,hidden,misplaced,appeared,hidden_std,misplaced_std,"
         "appeared_std,n_reports\n";
  for (const auto& r : rows) {
    out << r.params.f_hz << ',' << r.params.t_exp_us << ',' << r.params.t_on_us << ','
        << r.hidden << ',' << r.misplaced << ',' << r.appeared << ',' << r.hidden_std << ','
        << r.misplaced_std << ',' << r.appeared_std << ',' << r.n_reports << '\n';
  }
  return out.str();
}

}  // namespace rollsim
