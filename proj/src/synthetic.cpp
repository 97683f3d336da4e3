#include "ssvc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ssvc::synthetic {

namespace {

struct Wave {
  double fx = 0.0;
  double fy = 0.0;
  double phase = 0.0;
  double amp = 0.0;
};

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Integer hash for position-stable grain.
std::uint32_t hash3(std::int64_t x, std::int64_t y, std::uint64_t seed) {
  std::uint64_t h = seed * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(x) * 0xC2B2AE3D27D4EB4Full ^
                    static_cast<std::uint64_t>(y) * 0x165667B19E3779F9ull;
  h ^= h >> 29;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 32;
  return static_cast<std::uint32_t>(h);
}

class Texture {
 public:
  Texture(std::uint64_t seed, int waves, double min_period, double max_period, double grain)
      : seed_(seed), grain_(grain) {
    std::mt19937_64 rng(seed);
    for (int p = 0; p < kPlaneCount; ++p) {
      for (int i = 0; i < waves; ++i) {
        const double period = min_period + (max_period - min_period) * unit(rng);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        Wave w;
        w.fx = std::cos(angle) / period;
        w.fy = std::sin(angle) / period;
        w.phase = 2.0 * std::numbers::pi * unit(rng);
        w.amp = (p == 0 ? 60.0 : 25.0) / waves * (0.5 + unit(rng));
        waves_[p].push_back(w);
      }
    }
  }

  double sample(int plane, double x, double y, std::int64_t ix, std::int64_t iy) const {
    double v = 128.0;
    for (const Wave& w : waves_[plane]) {
      v += w.amp * std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
    }
    if (grain_ > 0.0) {
      v += grain_ * ((hash3(ix, iy, seed_ + plane) & 0xFF) / 255.0 - 0.5);
    }
    return v;
  }

 private:
  std::uint64_t seed_;
  double grain_;
  std::vector<Wave> waves_[kPlaneCount];
};

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

void render(Frame& f, const Texture& tex, int ox, int oy) {
  for (int p = 0; p < kPlaneCount; ++p) {
    Plane& plane = f.planes[p];
    const int s = p == 0 ? 1 : 2;
    for (int y = 0; y < plane.height; ++y) {
      for (int x = 0; x < plane.width; ++x) {
        const std::int64_t gx = static_cast<std::int64_t>(x) + ox / s;
        const std::int64_t gy = static_cast<std::int64_t>(y) + oy / s;
        plane.at(x, y) = to_u8(tex.sample(p, static_cast<double>(gx * s), static_cast<double>(gy * s), gx, gy));
      }
    }
  }
}

}  // namespace

Frame texture_window(int width, int height, int ox, int oy, std::uint64_t seed) {
  const Texture tex(seed, 6, 28.0, 90.0, 6.0);
  Frame f(width, height);
  render(f, tex, ox, oy);
  return f;
}

std::string Clip::annotation_text() const {
  std::string out = "frame,class,x,y,w,h\n";
  for (std::size_t t = 0; t < track.size(); ++t) {
    const PixelBox& b = track[t];
    out += std::to_string(t) + "," + std::to_string(class_id) + "," + std::to_string(b.a1) + "," +
           std::to_string(b.b1) + "," + std::to_string(b.width()) + "," + std::to_string(b.height()) + "\n";
  }
  return out;
}

semantics::AnnotationSet Clip::annotations() const {
  return semantics::parse_annotations(annotation_text(), frames.front().width(), frames.front().height());
}

Clip test_clip(int width, int height, int frames) {
  const Texture background(20240601, 8, 24.0, 160.0, 4.0);
  const Texture object(77, 5, 6.0, 20.0, 10.0);
  Clip clip;
  const int ow = std::max(8, width * 3 / 11);    // 96 at CIF
  const int oh = std::max(8, height * 5 / 18);   // 80 at CIF
  Frame base(width, height);
  render(base, background, 0, 0);
  for (int t = 0; t < frames; ++t) {
    // Quarter-pel-aligned path with a gentle vertical bob.
    const double px = 0.12 * width + 2.25 * t;
    const double py = 0.35 * height + 6.0 * std::sin(t * 0.2);
    const int x0 = std::clamp(static_cast<int>(std::lround(px)), 0, width - ow);
    const int y0 = std::clamp(static_cast<int>(std::lround(py)), 0, height - oh);
    Frame f = base;
    for (int p = 0; p < kPlaneCount; ++p) {
      Plane& plane = f.planes[p];
      const int s = p == 0 ? 1 : 2;
      for (int y = y0 / s; y < (y0 + oh) / s; ++y) {
        for (int x = x0 / s; x < (x0 + ow) / s; ++x) {
          // Elliptical silhouette; texture moves with the object.
          const double u = (x * s + 0.5 * s - (x0 + ow / 2.0)) / (ow / 2.0);
          const double v = (y * s + 0.5 * s - (y0 + oh / 2.0)) / (oh / 2.0);
          if (u * u + v * v > 1.0) continue;
          const std::int64_t lx = x - x0 / s;
          const std::int64_t ly = y - y0 / s;
          plane.at(x, y) = to_u8(object.sample(p, static_cast<double>(lx * s), static_cast<double>(ly * s), lx, ly) +
                                 (p == 0 ? -30.0 : 20.0));
        }
      }
    }
    clip.frames.push_back(std::move(f));
    clip.track.push_back(PixelBox{static_cast<std::uint16_t>(x0), static_cast<std::uint16_t>(y0),
                                  static_cast<std::uint16_t>(x0 + ow), static_cast<std::uint16_t>(y0 + oh)});
  }
  return clip;
}

}  // namespace ssvc::synthetic
