#include "ssvc/frame.hpp"

#include <algorithm>

#include "ssvc/error.hpp"

namespace ssvc {

int padded_size(int size, int multiple) {
  return (size + multiple - 1) / multiple * multiple;
}

namespace {

template <typename T>
PlaneOf<T> pad_plane(const PlaneOf<T>& src, int w, int h) {
  PlaneOf<T> out(w, h);
  for (int y = 0; y < h; ++y) {
    const T* in = src.row(std::min(y, src.height - 1));
    T* dst = out.row(y);
    std::copy(in, in + src.width, dst);
    std::fill(dst + src.width, dst + w, in[src.width - 1]);
  }
  return out;
}

template <typename T>
PlaneOf<T> crop_plane(const PlaneOf<T>& src, int w, int h) {
  if (w > src.width || h > src.height) {
    fail(ErrorKind::dimension, "crop larger than source plane");
  }
  PlaneOf<T> out(w, h);
  for (int y = 0; y < h; ++y) {
    std::copy(src.row(y), src.row(y) + w, out.row(y));
  }
  return out;
}

template <typename T>
FrameOf<T> crop_any(const FrameOf<T>& frame, int w, int h) {
  FrameOf<T> out;
  out.planes[0] = crop_plane(frame.planes[0], w, h);
  for (int p = 1; p < kPlaneCount; ++p) {
    out.planes[p] = crop_plane(frame.planes[p], (w + 1) / 2, (h + 1) / 2);
  }
  return out;
}

}  // namespace

Frame pad_frame(const Frame& frame, int multiple) {
  if (frame.empty()) fail(ErrorKind::dimension, "cannot pad an empty frame");
  const int w = padded_size(frame.width(), multiple);
  const int h = padded_size(frame.height(), multiple);
  Frame out;
  out.planes[0] = pad_plane(frame.planes[0], w, h);
  for (int p = 1; p < kPlaneCount; ++p) {
    out.planes[p] = pad_plane(frame.planes[p], w / 2, h / 2);
  }
  return out;
}

Frame crop_frame(const Frame& frame, int w, int h) { return crop_any(frame, w, h); }
FrameF crop_frame(const FrameF& frame, int w, int h) { return crop_any(frame, w, h); }
Mask crop_mask(const Mask& mask, int w, int h) { return crop_plane(mask, w, h); }

FrameF to_real(const Frame& frame) {
  FrameF out;
  for (int p = 0; p < kPlaneCount; ++p) {
    const Plane& src = frame.planes[p];
    out.planes[p] = PlaneF(src.width, src.height);
    std::copy(src.data.begin(), src.data.end(), out.planes[p].data.begin());
  }
  return out;
}

}  // namespace ssvc
