#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rollsim {

// Row-major interleaved RGB, 8 bits per channel.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::string frame_id;

  Frame() = default;
  Frame(int w, int h, std::string id = {})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0),
        frame_id(std::move(id)) {}

  std::uint8_t* px(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* px(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  std::span<std::uint8_t> row(int y) {
    return {pixels.data() + static_cast<std::size_t>(y) * width * 3,
            static_cast<std::size_t>(width) * 3};
  }
  std::span<const std::uint8_t> row(int y) const {
    return {pixels.data() + static_cast<std::size_t>(y) * width * 3,
            static_cast<std::size_t>(width) * 3};
  }

  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
      pixels[i] = r;
      pixels[i + 1] = g;
      pixels[i + 2] = b;
    }
  }

  bool same_size(const Frame& o) const { return width == o.width && height == o.height; }
  bool valid() const {
    return width > 0 && height > 0 &&
           pixels.size() == static_cast<std::size_t>(width) * height * 3;
  }
};

// BT.601 luma as doubles, row-major.
std::vector<double> luma(const Frame& frame);

}  // namespace rollsim
