#include "rollsim/stealth_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rollsim/errors.hpp"

namespace rollsim {

std::vector<double> luma(const Frame& frame) {
  std::vector<double> out(static_cast<std::size_t>(frame.width) * frame.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t* p = frame.pixels.data() + i * 3;
    out[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return out;
}

Plane luma_plane(const Frame& frame) { return Plane{frame.width, frame.height, luma(frame)}; }

Plane downsample2(const Plane& p) {
  Plane out;
  out.width = p.width / 2;
  out.height = p.height / 2;
  out.v.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.v[static_cast<std::size_t>(y) * out.width + x] =
          0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) +
                  p.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable "valid" filtering: output is (W - n + 1) x (H - n + 1).
Plane filter_valid(const Plane& in, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = in.width - n + 1;
  const int oh = in.height - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * in.height);
  for (int y = 0; y < in.height; ++y) {
    const double* row = in.v.data() + static_cast<std::size_t>(y) * in.width;
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * row[x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out.v[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.width, a.height, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct LocalStats {
  Plane mu_a, mu_b, var_a, var_b, cov;
};

LocalStats local_stats(const Plane& a, const Plane& b, const SsimParams& params) {
  if (a.width != b.width || a.height != b.height) {
    throw DataError("frame dimensions differ");
  }
  if (a.width < params.window || a.height < params.window) {
    throw DataError("frame smaller than the " + std::to_string(params.window) +
                    "-pixel metric window");
  }
  const auto k = gaussian_kernel(params.window, params.sigma);
  LocalStats s;
  s.mu_a = filter_valid(a, k);
  s.mu_b = filter_valid(b, k);
  s.var_a = filter_valid(product(a, a), k);
  s.var_b = filter_valid(product(b, b), k);
  s.cov = filter_valid(product(a, b), k);
  for (std::size_t i = 0; i < s.mu_a.v.size(); ++i) {
    const double ma = s.mu_a.v[i];
    const double mb = s.mu_b.v[i];
    s.var_a.v[i] -= ma * ma;
    s.var_b.v[i] -= mb * mb;
    s.cov.v[i] -= ma * mb;
  }
  return s;
}

struct SsimMeans {
  double ssim = 0.0;
  double cs = 0.0;
};

SsimMeans ssim_means(const Plane& a, const Plane& b, const SsimParams& params) {
  const LocalStats s = local_stats(a, b, params);
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  const std::size_t n = s.mu_a.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = s.mu_a.v[i];
    const double mb = s.mu_b.v[i];
    const double cs = (2.0 * s.cov.v[i] + c2) / (s.var_a.v[i] + s.var_b.v[i] + c2);
    const double l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    ssim_sum += l * cs;
    cs_sum += cs;
  }
  return {ssim_sum / n, cs_sum / n};
}

// Removes cancellation residue from E[x^2] - E[x]^2 on flat windows.
double snap(double v, double scale) {
  return std::abs(v) <= 1e-9 * std::max(1.0, scale) ? 0.0 : v;
}

}  // namespace

double ssim(const Plane& a, const Plane& b, const SsimParams& params) {
  return ssim_means(a, b, params).ssim;
}

double ssim(const Frame& a, const Frame& b, const SsimParams& params) {
  return ssim(luma_plane(a), luma_plane(b), params);
}

MsSsimResult ms_ssim_detail(const Plane& a, const Plane& b, const SsimParams& params) {
  if (a.width != b.width || a.height != b.height) throw DataError("frame dimensions differ");
  const int min_dim = std::min(a.width, a.height);
  int scales = static_cast<int>(kMsSsimWeights.size());
  while (scales > 1 && (min_dim >> (scales - 1)) < params.window) --scales;

  MsSsimResult result;
  result.scales_used = scales;
  result.reduced = scales < static_cast<int>(kMsSsimWeights.size());
  double weight_sum = 0.0;
  for (int j = 0; j < scales; ++j) weight_sum += kMsSsimWeights[j];

  Plane pa = a;
  Plane pb = b;
  double value = 1.0;
  for (int j = 0; j < scales; ++j) {
    const SsimMeans m = ssim_means(pa, pb, params);
    const double w = kMsSsimWeights[j] / weight_sum;
    const double term = (j == scales - 1) ? m.ssim : m.cs;
    value *= std::pow(std::max(term, 0.0), w);
    if (j + 1 < scales) {
      pa = downsample2(pa);
      pb = downsample2(pb);
    }
  }
  result.value = value;
  return result;
}

double ms_ssim(const Frame& a, const Frame& b, const SsimParams& params) {
  return ms_ssim_detail(luma_plane(a), luma_plane(b), params).value;
}

double uqi(const Plane& a, const Plane& b, const SsimParams& params) {
  const LocalStats s = local_stats(a, b, params);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < s.mu_a.v.size(); ++i) {
    const double ma = s.mu_a.v[i];
    const double mb = s.mu_b.v[i];
    const double va = snap(s.var_a.v[i], ma * ma);
    const double vb = snap(s.var_b.v[i], mb * mb);
    const double cov = snap(s.cov.v[i], std::abs(ma * mb));
    const double den = (va + vb) * (ma * ma + mb * mb);
    if (den == 0.0) {
      if (ma == mb && va == vb && cov == va) {
        sum += 1.0;
        ++counted;
      }
      continue;
    }
    sum += 4.0 * cov * ma * mb / den;
    ++counted;
  }
  return counted > 0 ? sum / counted : 0.0;
}

double uqi(const Frame& a, const Frame& b, const SsimParams& params) {
  return uqi(luma_plane(a), luma_plane(b), params);
}

double dissimilarity(double metric_value) {
  return 1.0 - std::clamp(metric_value, 0.0, 1.0);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kLegit:
      return "legit";
    case Scenario::kRolling:
      return "rolling";
    case Scenario::kBlinding:
      return "blinding";
  }
  return "legit";
}

Scenario parse_scenario(const std::string& s) {
  if (s == "legit") return Scenario::kLegit;
  if (s == "rolling") return Scenario::kRolling;
  if (s == "blinding") return Scenario::kBlinding;
  throw DataError("unknown scenario '" + s + "'");
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::kSsim:
      return "ssim";
    case Metric::kMsSsim:
      return "ms_ssim";
    case Metric::kUqi:
      return "uqi";
  }
  return "ssim";
}

double StealthRecord::value(Metric m) const {
  switch (m) {
    case Metric::kSsim:
      return ssim_d;
    case Metric::kMsSsim:
      return msssim_d;
    case Metric::kUqi:
      return uqi_d;
  }
  return ssim_d;
}

StealthRecord measure_pair(const FramePair& pair) {
  if (pair.prev == nullptr || pair.curr == nullptr) throw DataError("frame pair is incomplete");
  const Plane a = luma_plane(*pair.prev);
  const Plane b = luma_plane(*pair.curr);
  StealthRecord r;
  r.video_id = pair.video_id;
  r.pair_index = pair.pair_index;
  r.scenario = pair.scenario;
  r.ssim_d = dissimilarity(ssim(a, b));
  r.msssim_d = dissimilarity(ms_ssim_detail(a, b).value);
  r.uqi_d = dissimilarity(uqi(a, b));
  return r;
}

std::vector<StealthRecord> build_records(const std::vector<FramePair>& pairs) {
  std::vector<StealthRecord> out;
  for (const auto& p : pairs) {
    StealthRecord r = measure_pair(p);
    if (r.ssim_d == 0.0 && r.msssim_d == 0.0 && r.uqi_d == 0.0) continue;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<bool> threshold_detector(const std::vector<StealthRecord>& records, Metric metric,
                                     double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
  std::vector<bool> labels;
  labels.reserve(records.size());
  for (const auto& r : records) {
    const double v = r.value(metric);
    labels.push_back(v != 0.0 && v > threshold);
  }
  return labels;
}

double roc_auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw DataError("roc_auc needs at least one positive and one negative score");
  }
  // Mann-Whitney U counted in half units so ties stay exact.
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(positives.size() + negatives.size());
  for (double s : positives) items.push_back({s, true});
  for (double s : negatives) items.push_back({s, false});
  std::sort(items.begin(), items.end(),
            [](const Item& x, const Item& y) { return x.score < y.score; });

  long long negatives_below = 0;
  long long twice_u = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    long long pos_tied = 0;
    long long neg_tied = 0;
    while (j < items.size() && items[j].score == items[i].score) {
      (items[j].positive ? pos_tied : neg_tied) += 1;
      ++j;
    }
    twice_u += pos_tied * (2 * negatives_below + neg_tied);
    negatives_below += neg_tied;
    i = j;
  }
  const double pairs = static_cast<double>(positives.size()) * negatives.size();
  return static_cast<double>(twice_u) / (2.0 * pairs);
}

std::vector<AucRow> stealth_report(const std::vector<StealthRecord>& records) {
  std::vector<AucRow> out;
  for (Metric m : kAllMetrics) {
    std::vector<double> legit;
    for (const auto& r : records) {
      if (r.scenario == Scenario::kLegit && r.value(m) != 0.0) legit.push_back(r.value(m));
    }
    if (legit.empty()) continue;
    const double threshold = *std::max_element(legit.begin(), legit.end());
    for (Scenario sc : {Scenario::kRolling, Scenario::kBlinding}) {
      std::vector<double> attack;
      for (const auto& r : records) {
        if (r.scenario == sc && r.value(m) != 0.0) attack.push_back(r.value(m));
      }
      if (attack.empty()) continue;
      AucRow row{m, sc};
      row.auc = roc_auc(attack, legit);
      row.threshold_at_0fpr = threshold;
      const auto flagged = std::count_if(attack.begin(), attack.end(),
                                         [&](double v) { return v > threshold; });
      row.detection_rate_at_0fpr = static_cast<double>(flagged) / attack.size();
      out.push_back(row);
    }
  }
  return out;
}

std::string records_csv(const std::vector<StealthRecord>& records) {
  std::ostringstream out;
  out.precision(10);
  out << "video_id,pair_index,scenario,metric,dissimilarity\n";
  for (const auto& r : records) {
    for (Metric m : kAllMetrics) {
      out << r.video_id << ',' << r.pair_index << ',' << scenario_name(r.scenario) << ','
          << metric_name(m) << ',' << r.value(m) << '\n';
    }
  }
  return out.str();
}

std::string auc_csv(const std::vector<AucRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "metric,scenario,auc,threshold_at_0fpr,detection_rate_at_0fpr\n";
  for (const auto& r : rows) {
    out << metric_name(r.metric) << ',' << scenario_name(r.scenario) << ',' << r.auc << ','
        << r.threshold_at_0fpr << ',' << r.detection_rate_at_0fpr << '\n';
  }
  return out.str();
}

}  // namespace rollsim
