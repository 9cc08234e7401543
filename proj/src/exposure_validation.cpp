#include "rollsim/exposure_validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rollsim/errors.hpp"

namespace rollsim {

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::kR:
      return "R";
    case Channel::kG:
      return "G";
    case Channel::kB:
      return "B";
  }
  return "R";
}

std::uint64_t ChannelHistogram::total() const {
  std::uint64_t t = 0;
  for (auto b : bins) t += b;
  return t;
}

std::array<ChannelHistogram, 3> channel_histograms(const Frame& frame) {
  std::array<ChannelHistogram, 3> out;
  for (int c = 0; c < 3; ++c) out[c].channel = static_cast<Channel>(c);
  for (std::size_t i = 0; i < frame.pixels.size(); i += 3) {
    ++out[0].bins[frame.pixels[i]];
    ++out[1].bins[frame.pixels[i + 1]];
    ++out[2].bins[frame.pixels[i + 2]];
  }
  return out;
}

double histogram_cross_correlation(const ChannelHistogram& a, const ChannelHistogram& b) {
  if (a.channel != b.channel) throw DataError("histograms are for different channels");
  double ma = 0.0;
  double mb = 0.0;
  for (int i = 0; i < 256; ++i) {
    ma += static_cast<double>(a.bins[i]);
    mb += static_cast<double>(b.bins[i]);
  }
  ma /= 256.0;
  mb /= 256.0;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (int i = 0; i < 256; ++i) {
    const double da = a.bins[i] - ma;
    const double db = b.bins[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    if (a.bins == b.bins) return 1.0;
    throw DataError("zero-variance histogram for channel " + channel_name(a.channel));
  }
  return sab / std::sqrt(saa * sbb);
}

Frame simulate_capture(const Frame& base_scene, double t_exp_us, double t_ref_us,
                       double noise_sigma, std::uint64_t seed) {
  if (!(t_exp_us > 0.0) || !(t_ref_us > 0.0)) throw ConfigError("exposures must be > 0");
  Frame out = base_scene;
  const double gain = t_exp_us / t_ref_us;
  std::mt19937_64 rng(seed);
  // Box-Muller on our own uniforms keeps the noise identical across stdlibs.
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  for (std::size_t i = 0; i < out.pixels.size(); i += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double n[2] = {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    for (std::size_t k = 0; k < 2 && i + k < out.pixels.size(); ++k) {
      const double v = base_scene.pixels[i + k] * gain + noise_sigma * n[k];
      out.pixels[i + k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

std::vector<ExposureCorrelationRow> exposure_correlation(const Frame& base_scene,
                                                         double t_ref_us,
                                                         const std::vector<double>& offsets_us,
                                                         double noise_sigma,
                                                         std::uint64_t seed) {
  const Frame reference = simulate_capture(base_scene, t_ref_us, t_ref_us, noise_sigma, seed);
  const auto ref_hist = channel_histograms(reference);
  std::vector<ExposureCorrelationRow> rows;
  for (std::size_t k = 0; k < offsets_us.size(); ++k) {
    const Frame capture = simulate_capture(base_scene, t_ref_us + offsets_us[k], t_ref_us,
                                           noise_sigma, seed + 1 + k);
    const auto hist = channel_histograms(capture);
    std::ostringstream label;
    label << "offset_" << offsets_us[k];
    for (int c = 0; c < 3; ++c) {
      rows.push_back({static_cast<Channel>(c), label.str(),
                      histogram_cross_correlation(ref_hist[c], hist[c])});
    }
  }
  return rows;
}

std::string exposure_csv(const std::vector<ExposureCorrelationRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "channel,scenario,correlation\n";
  for (const auto& r : rows) {
    out << channel_name(r.channel) << ',' << r.scenario << ',' << r.correlation << '\n';
  }
  return out.str();
}

}  // namespace rollsim
