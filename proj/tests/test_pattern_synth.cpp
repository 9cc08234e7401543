#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "rollsim/corruption.hpp"
#include "rollsim/errors.hpp"
#include "rollsim/pattern_synth.hpp"

using namespace rollsim;

namespace {

TimelineConfig timeline(double F, int rows, int visible, double f, double duty, double t_exp,
                        int n_frames) {
  TimelineConfig tc;
  tc.spec.frame_rate = F;
  tc.spec.n_rows_total = rows;
  tc.spec.n_rows_visible = visible;
  tc.laser.frequency_hz = f;
  tc.laser.duty_cycle = duty;
  tc.env.exposure_us = t_exp;
  tc.n_frames = n_frames;
  tc.seed = 42;
  return tc;
}

std::vector<double> dense(const DistortionPattern& p, int rows) {
  std::vector<double> out(static_cast<std::size_t>(rows), 0.0);
  for (const auto& iv : p.intervals) {
    for (int i = 0; i < iv.rows(); ++i) out[iv.row_start + i] = iv.intensity[i];
  }
  return out;
}

}  // namespace

TEST(Synthesize, MatchesRowScanOracle) {
  auto tc = timeline(25, 400, 400, 130, 0.02, 700, 4);
  tc.explicit_phase = true;
  tc.laser.phase_s = 0.0013;
  const auto res = synthesize(tc);
  const double rps = 25.0 * 400;
  for (int k = 0; k < 4; ++k) {
    const auto expect = oracle::row_intensity(400, 700e-6 * rps, tc.laser.on_time_us() * 1e-6 * rps,
                                              rps / 130, 0.0013 * rps, k);
    const auto got = dense(res.patterns[k], 400);
    for (int r = 0; r < 400; ++r) {
      ASSERT_NEAR(got[r], std::min(1.0, expect[r]), 1e-9) << "frame " << k << " row " << r;
    }
  }
}

TEST(Synthesize, IntegerMultipleIsStatic) {
  auto tc = timeline(30, 1080, 1080, 900, 0.05, 200, 12);
  const auto res = synthesize(tc);
  ASSERT_EQ(res.patterns.size(), 12u);
  for (int k = 1; k < 12; ++k) {
    const auto& a = res.patterns[0].intervals;
    const auto& b = res.patterns[k].intervals;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].row_start, b[i].row_start);
      EXPECT_EQ(a[i].row_end, b[i].row_end);
      for (int r = 0; r < a[i].rows(); ++r) EXPECT_NEAR(a[i].intensity[r], b[i].intensity[r], 1e-9);
    }
  }
}

// With top-to-bottom readout, a pulse train slightly faster than the frame
// rate lands earlier in each successive frame, so the band climbs. A slower
// train makes it descend.
TEST(Synthesize, ScrollDirectionFollowsTimeline) {
  for (double df : {1.0, -1.0}) {
    auto tc = timeline(30, 1080, 1080, 30 + df, 0.005, 200, 12);
    tc.explicit_phase = true;
    tc.laser.phase_s = 0.5 / 30;  // first pulse mid-frame
    const auto res = synthesize(tc);
    for (int k = 1; k < 12; ++k) {
      const double prev = res.patterns[k - 1].centroid();
      const double cur = res.patterns[k].centroid();
      if (df > 0) {
        EXPECT_LT(cur, prev) << "frame " << k;
        EXPECT_NEAR(prev - cur, 1080.0 / 31.0, 1.0);
      } else {
        EXPECT_GT(cur, prev) << "frame " << k;
        EXPECT_NEAR(cur - prev, 1080.0 / 29.0, 1.0);
      }
    }
  }
}

TEST(Synthesize, CountMatchesDistortionsPerFrame) {
  auto tc = timeline(25, 2160, 1080, 750, 0.4, 200, 200);
  const auto res = synthesize(tc);
  const double mean =
      std::accumulate(res.injections_per_frame.begin(), res.injections_per_frame.end(), 0.0) /
      res.injections_per_frame.size();
  EXPECT_NEAR(mean, distortions_per_frame(tc.laser, tc.spec), 0.05 * 15);
  // The same holds for every layout.
  for (auto layout : {DeadAreaLayout::kLeadingBlock, DeadAreaLayout::kSplit}) {
    tc.dead_area_layout = layout;
    const auto r = synthesize(tc);
    const double m =
        std::accumulate(r.injections_per_frame.begin(), r.injections_per_frame.end(), 0.0) / 200;
    EXPECT_NEAR(m, 15.0, 0.75);
  }
}

TEST(Synthesize, IntervalWidthsWithinBounds) {
  for (double t_exp : {32.0, 200.0, 625.0}) {
    for (double duty : {0.001, 0.01, 0.05}) {
      auto tc = timeline(25, 2160, 1080, 250, duty, t_exp, 30);
      const auto res = synthesize(tc);
      const auto b = distortion_bounds(t_exp, tc.laser.on_time_us(), delta_t_rst(tc.spec));
      for (const auto& p : res.patterns) {
        for (const auto& iv : p.intervals) {
          if (iv.row_start == 0 || iv.row_end == 1079) continue;  // cut by the frame edge
          EXPECT_GE(iv.rows(), b.n_min_effective());
          EXPECT_LE(iv.rows(), b.n_max);
        }
      }
    }
  }
}

TEST(Synthesize, IntensityIsOverlapFraction) {
  // t_on >= t_exp: interior rows integrate the full exposure.
  auto tc = timeline(25, 1000, 1000, 25, 0.01, 40, 1);
  tc.explicit_phase = true;
  tc.laser.phase_s = 0.01002;
  const auto res = synthesize(tc);
  ASSERT_EQ(res.patterns[0].intervals.size(), 1u);
  const auto& iv = res.patterns[0].intervals[0];
  EXPECT_DOUBLE_EQ(iv.intensity[iv.rows() / 2], 1.0);
  EXPECT_LT(iv.intensity.front(), 1.0);
  EXPECT_LT(iv.intensity.back(), 1.0);
  EXPECT_NO_THROW(res.patterns[0].validate(1000));
}

TEST(Synthesize, GainScalesAndSaturates) {
  auto tc = timeline(25, 1000, 1000, 25, 0.0005, 400, 1);
  tc.explicit_phase = true;
  tc.laser.phase_s = 0.01;
  const auto one = synthesize(tc);
  tc.laser.irradiance_gain = 0.5;
  const auto half = synthesize(tc);
  ASSERT_FALSE(one.patterns[0].empty());
  ASSERT_FALSE(half.patterns[0].empty());
  const auto& a = one.patterns[0].intervals[0];
  const auto& b = half.patterns[0].intervals[0];
  for (int i = 0; i < a.rows(); ++i) EXPECT_NEAR(b.intensity[i], a.intensity[i] / 2, 1e-12);
  tc.laser.irradiance_gain = 1000;
  const auto bright = synthesize(tc);
  ASSERT_FALSE(bright.patterns[0].empty());
  for (double v : bright.patterns[0].intervals[0].intensity) EXPECT_LE(v, 1.0);
}

TEST(Synthesize, DeterministicAndSeededPhase) {
  auto tc = timeline(25, 2160, 1080, 500, 0.1, 200, 20);
  const auto a = synthesize(tc);
  const auto b = synthesize(tc);
  EXPECT_EQ(a.patterns, b.patterns);
  EXPECT_EQ(a.phase_s, b.phase_s);
  tc.seed = 43;
  EXPECT_NE(synthesize(tc).phase_s, a.phase_s);
}

TEST(Synthesize, AllPulsesInDeadAreaSignalsEmpty) {
  auto tc = timeline(25, 2160, 1080, 25, 0.0001, 32, 5);
  tc.explicit_phase = true;
  tc.laser.phase_s = 1600.0 / (25.0 * 2160);  // onset at row 1600, inside the dead block
  const auto res = synthesize(tc);
  EXPECT_FALSE(res.any_visible_hit);
  EXPECT_TRUE(res.patterns.empty());
}

TEST(Synthesize, RejectsBadConfig) {
  auto tc = timeline(25, 2160, 1080, 25, 0.1, 32, 0);
  EXPECT_THROW(synthesize(tc), ConfigError);
}

TEST(Layout, FirstVisibleRow) {
  CameraSpec c;
  c.n_rows_total = 2160;
  c.n_rows_visible = 1080;
  EXPECT_EQ(first_visible_row(c, DeadAreaLayout::kTrailingBlock), 0);
  EXPECT_EQ(first_visible_row(c, DeadAreaLayout::kLeadingBlock), 1080);
  EXPECT_EQ(first_visible_row(c, DeadAreaLayout::kSplit), 540);
  EXPECT_EQ(parse_layout("split"), DeadAreaLayout::kSplit);
  EXPECT_EQ(layout_name(parse_layout("leading_block")), "leading_block");
  EXPECT_THROW(parse_layout("middle"), ConfigError);
}

TEST(Extract, BlackFrameIsEmpty) {
  Frame f(64, 48);
  EXPECT_TRUE(extract_pattern(f, 10, 64, 48).empty());
}

TEST(Extract, SaturatedRows) {
  Frame f(64, 200);
  for (int y = 100; y <= 104; ++y) {
    for (auto& v : f.row(y)) v = 255;
  }
  const auto p = extract_pattern(f, 10, 64, 200);
  ASSERT_EQ(p.intervals.size(), 1u);
  EXPECT_EQ(p.intervals[0].row_start, 100);
  EXPECT_EQ(p.intervals[0].row_end, 104);
  for (double v : p.intervals[0].intensity) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Extract, HalfRowRule) {
  Frame f(10, 4);
  for (int x = 0; x < 5; ++x) f.px(x, 1)[0] = 255;  // exactly half
  for (int x = 0; x < 4; ++x) f.px(x, 2)[0] = 255;  // under half
  const auto p = extract_pattern(f, 10, 10, 4);
  ASSERT_EQ(p.intervals.size(), 1u);
  EXPECT_EQ(p.intervals[0].row_start, 1);
  EXPECT_EQ(p.intervals[0].row_end, 1);
  EXPECT_DOUBLE_EQ(p.intervals[0].intensity[0], 0.5);
}

TEST(Extract, RejectsDimensionMismatch) {
  Frame f(64, 48);
  EXPECT_THROW(extract_pattern(f, 10, 64, 50), DataError);
}

TEST(Extract, RoundTripsFullIntensityPatterns) {
  DistortionPattern p;
  p.color = {0.25, 0.45, 1.0};
  p.intervals = {{3, 7, std::vector<double>(5, 1.0)}, {20, 20, {1.0}}, {40, 59, std::vector<double>(20, 1.0)}};
  const Frame black(32, 60);
  const auto back = extract_pattern(overlay(black, p), 10, 32, 60);
  EXPECT_EQ(back.intervals, p.intervals);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(back.color[c], p.color[c], 0.5 / 255 + 1e-9);
}

TEST(Extract, RecoversSynthesizedIntervals) {
  auto tc = timeline(25, 600, 600, 250, 0.05, 400, 3);
  auto res = synthesize(tc);
  for (auto& pat : res.patterns) {
    for (auto& iv : pat.intervals) std::fill(iv.intensity.begin(), iv.intensity.end(), 1.0);
    pat.color = {1, 1, 1};
    const auto back = extract_pattern(overlay(Frame(16, 600), pat), 10, 16, 600);
    EXPECT_EQ(back.intervals, pat.intervals);
  }
}

TEST(Rescale, IdentityAndHalving) {
  DistortionPattern p;
  p.frame_index = 3;
  p.intervals = {{10, 13, {1, 1, 0.5, 0.5}}};
  EXPECT_EQ(rescale_pattern(p, 100, 100), p);
  const auto h = rescale_pattern(p, 100, 50);
  ASSERT_EQ(h.intervals.size(), 1u);
  EXPECT_EQ(h.frame_index, 3);
  EXPECT_EQ(h.intervals[0].row_start, 5);
  EXPECT_EQ(h.intervals[0].row_end, 6);
  EXPECT_DOUBLE_EQ(h.intervals[0].intensity[0], 1.0);
  EXPECT_DOUBLE_EQ(h.intervals[0].intensity[1], 0.5);
  EXPECT_NO_THROW(h.validate(50));
}

TEST(Pattern, ValidateRejectsBadIntervals) {
  DistortionPattern p;
  p.intervals = {{5, 4, {}}};
  EXPECT_THROW(p.validate(10), DataError);
  p.intervals = {{0, 1, {0.5}}};
  EXPECT_THROW(p.validate(10), DataError);
  p.intervals = {{0, 1, {0.5, 0.5}}, {1, 2, {0.5, 0.5}}};
  EXPECT_THROW(p.validate(10), DataError);
  p.intervals = {{8, 10, {0.5, 0.5, 0.5}}};
  EXPECT_THROW(p.validate(10), DataError);
  p.intervals = {{0, 0, {1.5}}};
  EXPECT_THROW(p.validate(10), DataError);
}
