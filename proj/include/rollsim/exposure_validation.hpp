#pragma once

// Exposure-estimate validation: per-channel colour histograms and their
// zero-lag Pearson correlation between a reference capture and a capture
// taken at another exposure.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rollsim/frame.hpp"

namespace rollsim {

enum class Channel { kR = 0, kG = 1, kB = 2 };
std::string channel_name(Channel c);

struct ChannelHistogram {
  Channel channel = Channel::kR;
  std::array<std::uint64_t, 256> bins{};

  std::uint64_t total() const;
};

std::array<ChannelHistogram, 3> channel_histograms(const Frame& frame);

// Pearson correlation of the two bin vectors. Two zero-variance histograms
// correlate to 1 when identical; any other zero-variance case throws
// DataError.
double histogram_cross_correlation(const ChannelHistogram& a, const ChannelHistogram& b);

// Synthetic capture: value = clamp(base * t_exp / t_ref + N(0, noise_sigma)),
// rounded. Deterministic for a given seed.
Frame simulate_capture(const Frame& base_scene, double t_exp_us, double t_ref_us,
                       double noise_sigma, std::uint64_t seed);

struct ExposureCorrelationRow {
  Channel channel;
  std::string scenario;
  double correlation = 0.0;
};

// Correlates a reference capture at t_ref with captures at t_ref + offset for
// each offset. Scenario labels are "offset_<us>".
std::vector<ExposureCorrelationRow> exposure_correlation(const Frame& base_scene,
                                                         double t_ref_us,
                                                         const std::vector<double>& offsets_us,
                                                         double noise_sigma, std::uint64_t seed);

std::string exposure_csv(const std::vector<ExposureCorrelationRow>& rows);

}  // namespace rollsim
