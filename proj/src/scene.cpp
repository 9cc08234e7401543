#include "rollsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rollsim/errors.hpp"

namespace rollsim {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic value in [-1, 1] for an integer lattice point.
double lattice(std::uint64_t seed, std::int64_t x, std::int64_t y, std::int64_t z = 0) {
  std::uint64_t h = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(x) * 0x100000001b3ULL ^
                                             splitmix(static_cast<std::uint64_t>(y) ^
                                                      (static_cast<std::uint64_t>(z) << 32))));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

double value_noise(std::uint64_t seed, double x, double y, double cell) {
  const double fx = x / cell;
  const double fy = y / cell;
  const auto x0 = static_cast<std::int64_t>(std::floor(fx));
  const auto y0 = static_cast<std::int64_t>(std::floor(fy));
  const double tx = fx - x0;
  const double ty = fy - y0;
  const double a = lattice(seed, x0, y0);
  const double b = lattice(seed, x0 + 1, y0);
  const double c = lattice(seed, x0, y0 + 1);
  const double d = lattice(seed, x0 + 1, y0 + 1);
  const double top = a + (b - a) * tx;
  const double bot = c + (d - c) * tx;
  return top + (bot - top) * ty;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct SceneObject {
  int cls = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct Building {
  double x = 0.0;
  double w = 0.0;
  double top = 0.0;
  double shade = 0.0;
};

}  // namespace

const std::vector<ObjectClass>& object_classes() {
  static const std::vector<ObjectClass> classes{
      {"car", {200, 40, 40}},
      {"person", {40, 160, 70}},
      {"truck", {230, 200, 40}},
      {"bus", {40, 90, 200}},
  };
  return classes;
}

SceneVideo render_scene(const SceneSpec& spec, const std::string& video_id) {
  if (spec.width < 16 || spec.height < 16 || spec.n_frames < 1) {
    throw ConfigError("scene must be at least 16x16 with one frame");
  }
  std::mt19937_64 rng(spec.seed);
  const double w = spec.width;
  const double h = spec.height;
  const double horizon = h * uniform(rng, 0.35, 0.45);
  const double pan = spec.motion_px_per_frame * uniform(rng, -0.5, 0.5);

  std::vector<Building> buildings;
  for (double x = -w; x < 2 * w;) {
    Building b;
    b.x = x;
    b.w = uniform(rng, w * 0.08, w * 0.2);
    b.top = horizon * uniform(rng, 0.2, 0.8);
    b.shade = uniform(rng, 95.0, 160.0);
    buildings.push_back(b);
    x += b.w + uniform(rng, 0.0, w * 0.05);
  }

  const auto& classes = object_classes();
  std::vector<SceneObject> objects;
  for (int i = 0; i < spec.n_objects; ++i) {
    SceneObject o;
    o.cls = static_cast<int>(rng() % classes.size());
    const double scale = uniform(rng, 0.8, 1.3) * h / 180.0;
    switch (o.cls) {
      case 0: o.w = 40 * scale; o.h = 20 * scale; break;
      case 1: o.w = 10 * scale; o.h = 24 * scale; break;
      case 2: o.w = 60 * scale; o.h = 30 * scale; break;
      default: o.w = 70 * scale; o.h = 28 * scale; break;
    }
    o.x = uniform(rng, 0.0, w - o.w);
    o.y = uniform(rng, horizon, h - o.h);
    const double speed = spec.motion_px_per_frame * uniform(rng, 0.5, 1.5);
    o.vx = (rng() & 1) ? speed : -speed;
    o.vy = spec.motion_px_per_frame * uniform(rng, -0.2, 0.2);
    objects.push_back(o);
  }
  // Far objects first so nearer (lower) ones are drawn on top.
  std::sort(objects.begin(), objects.end(), [](const SceneObject& a, const SceneObject& b) {
    return a.y + a.h < b.y + b.h;
  });

  const std::uint64_t texture_seed = splitmix(spec.seed ^ 0x5eed);
  SceneVideo video;
  video.video_id = video_id;
  for (int f = 0; f < spec.n_frames; ++f) {
    char fid[16];
    std::snprintf(fid, sizeof(fid), "%06d", f);
    Frame frame(spec.width, spec.height, fid);
    const double shift = pan * f;
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const double wx = x + shift;
        double r, g, b;
        if (y < horizon) {
          const double t = y / horizon;
          r = 150 + 30 * t;
          g = 170 + 20 * t;
          b = 195 + 10 * t;
          for (const auto& bd : buildings) {
            if (wx >= bd.x && wx < bd.x + bd.w && y >= bd.top) {
              const bool window = (static_cast<int>(wx - bd.x) / 4 % 3 == 1) &&
                                  (static_cast<int>(y - bd.top) / 5 % 2 == 1);
              r = g = b = window ? bd.shade * 0.6 : bd.shade;
              break;
            }
          }
        } else {
          r = g = 88;
          b = 94;
          const double lane_y = horizon + (h - horizon) * 0.55;
          if (std::abs(y - lane_y) < 1.5 && std::fmod(std::abs(wx), 24.0) < 12.0) {
            r = g = b = 225;
          }
        }
        const double tex = 14.0 * value_noise(texture_seed, wx, y, 9.0) +
                           3.0 * lattice(texture_seed + 17 + f, x, y);
        std::uint8_t* p = frame.px(x, y);
        p[0] = to_byte(r + tex);
        p[1] = to_byte(g + tex);
        p[2] = to_byte(b + tex);
      }
    }

    BoxSet truth;
    truth.frame_id = frame.frame_id;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const auto& o = objects[i];
      const double ox = o.x + o.vx * f;
      const double oy = o.y + o.vy * f;
      const int x0 = std::max(0, static_cast<int>(std::lround(ox)));
      const int y0 = std::max(0, static_cast<int>(std::lround(oy)));
      const int x1 = std::min(spec.width, static_cast<int>(std::lround(ox + o.w)));
      const int y1 = std::min(spec.height, static_cast<int>(std::lround(oy + o.h)));
      if (x1 - x0 < 2 || y1 - y0 < 2) continue;
      const auto& c = classes[o.cls].color;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const double n = 5.0 * lattice(texture_seed + 101 + i, x - x0, y - y0, f);
          std::uint8_t* p = frame.px(x, y);
          for (int k = 0; k < 3; ++k) p[k] = to_byte(c[k] + n);
        }
      }
      truth.boxes.push_back({static_cast<double>(x0), static_cast<double>(y0),
                             static_cast<double>(x1), static_cast<double>(y1),
                             classes[o.cls].label, 1.0});
    }
    video.truth.push_back(std::move(truth));
    video.frames.push_back(std::move(frame));
  }
  return video;
}

std::vector<SceneVideo> make_fixture_corpus(int n_videos, int frames_per_video, int width,
                                            int height, std::uint64_t seed) {
  std::vector<SceneVideo> out;
  std::mt19937_64 rng(seed);
  for (int v = 0; v < n_videos; ++v) {
    SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.n_frames = frames_per_video;
    spec.n_objects = 4 + static_cast<int>(rng() % 5);
    spec.motion_px_per_frame = uniform(rng, 0.3, 4.0);
    spec.seed = rng();
    char id[32];
    std::snprintf(id, sizeof(id), "video_%03d", v);
    out.push_back(render_scene(spec, id));
  }
  return out;
}

}  // namespace rollsim
