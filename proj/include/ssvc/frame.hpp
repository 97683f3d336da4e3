#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ssvc {

// Planar sample buffer, row-major, tightly packed.
template <typename T>
struct PlaneOf {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  PlaneOf() = default;
  PlaneOf(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  T* row(int y) { return data.data() + static_cast<std::size_t>(y) * width; }
  const T* row(int y) const {
    return data.data() + static_cast<std::size_t>(y) * width;
  }

  bool operator==(const PlaneOf&) const = default;
};

using Plane = PlaneOf<std::uint8_t>;
using PlaneF = PlaneOf<double>;

inline constexpr int kPlaneCount = 3;

// 8-bit 4:2:0 frame: Y at full resolution, Cb/Cr at ceil(w/2) x ceil(h/2).
template <typename T>
struct FrameOf {
  std::array<PlaneOf<T>, kPlaneCount> planes;

  FrameOf() = default;
  FrameOf(int w, int h, T fill = T{}) {
    planes[0] = PlaneOf<T>(w, h, fill);
    planes[1] = PlaneOf<T>((w + 1) / 2, (h + 1) / 2, fill);
    planes[2] = PlaneOf<T>((w + 1) / 2, (h + 1) / 2, fill);
  }

  int width() const { return planes[0].width; }
  int height() const { return planes[0].height; }
  bool empty() const { return planes[0].data.empty(); }

  bool operator==(const FrameOf&) const = default;
};

using Frame = FrameOf<std::uint8_t>;
using FrameF = FrameOf<double>;

// Luma-resolution validity map for partially decoded frames (1 = decoded).
using Mask = PlaneOf<std::uint8_t>;

int padded_size(int size, int multiple);

// Edge-replicating pad of every plane up to multiples of `multiple` (luma).
Frame pad_frame(const Frame& frame, int multiple);

// Top-left crop to w x h luma (chroma follows the 4:2:0 rule).
Frame crop_frame(const Frame& frame, int w, int h);
FrameF crop_frame(const FrameF& frame, int w, int h);
Mask crop_mask(const Mask& mask, int w, int h);

FrameF to_real(const Frame& frame);

// Dense (rows x cols x channels) grid, cell-major: the channel vector of one
// cell is contiguous.
template <typename T>
struct Grid3 {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<T> values;

  Grid3() = default;
  Grid3(int r, int c, int ch, T fill = T{})
      : rows(r),
        cols(c),
        channels(ch),
        values(static_cast<std::size_t>(r) * c * ch, fill) {}

  int cell_count() const { return rows * cols; }
  T* cell(int index) {
    return values.data() + static_cast<std::size_t>(index) * channels;
  }
  const T* cell(int index) const {
    return values.data() + static_cast<std::size_t>(index) * channels;
  }
  T* cell(int r, int c) { return cell(r * cols + c); }
  const T* cell(int r, int c) const { return cell(r * cols + c); }

  bool operator==(const Grid3&) const = default;
};

using LatentGrid = Grid3<std::int32_t>;
using LatentPlane = Grid3<double>;

}  // namespace ssvc
