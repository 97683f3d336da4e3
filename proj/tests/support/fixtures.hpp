#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ssvc/container.hpp"
#include "ssvc/entropy/range_coder.hpp"
#include "ssvc/frame.hpp"
#include "ssvc/partition.hpp"
#include "ssvc/semantics.hpp"
#include "ssvc/synthetic.hpp"

namespace fixture {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline ssvc::Frame random_frame(int w, int h, Rng& rng) {
  ssvc::Frame f(w, h);
  for (auto& p : f.planes) {
    for (auto& v : p.data) v = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
  }
  return f;
}

// Smooth content: random frames are useless for motion search.
inline ssvc::Frame smooth_frame(int w, int h, Rng& rng) {
  return ssvc::synthetic::texture_window(w, h, 0, 0, rng());
}

inline ssvc::PixelBox random_box(Rng& rng, int w, int h) {
  const int a1 = uniform_int(rng, 0, w - 1);
  const int b1 = uniform_int(rng, 0, h - 1);
  const int a2 = uniform_int(rng, a1 + 1, std::min(w, a1 + std::max(2, w / 2)));
  const int b2 = uniform_int(rng, b1 + 1, std::min(h, b1 + std::max(2, h / 2)));
  return ssvc::PixelBox{static_cast<std::uint16_t>(a1), static_cast<std::uint16_t>(b1),
                        static_cast<std::uint16_t>(a2), static_cast<std::uint16_t>(b2)};
}

inline std::vector<ssvc::ObjectRecord> random_objects(Rng& rng, int w, int h, int max_count) {
  std::vector<ssvc::ObjectRecord> out;
  const int n = uniform_int(rng, 0, max_count);
  for (int i = 0; i < n; ++i) {
    ssvc::ObjectRecord o;
    o.class_id = static_cast<std::uint16_t>(uniform_int(rng, 0, 79));
    o.bbox = random_box(rng, w, h);
    out.push_back(o);
  }
  return out;
}

struct RandomStream {
  ssvc::container::GlobalHeader header;
  std::vector<ssvc::container::GopPayload> gops;
};

// A structurally valid stream with random headers, objects and chunk bytes.
inline RandomStream random_stream(Rng& rng) {
  namespace c = ssvc::container;
  RandomStream s;
  s.header.width = static_cast<std::uint16_t>(uniform_int(rng, 1, 200));
  s.header.height = static_cast<std::uint16_t>(uniform_int(rng, 1, 200));
  s.header.frame_count = static_cast<std::uint32_t>(uniform_int(rng, 1, 25));
  s.header.gop_size = static_cast<std::uint8_t>(uniform_int(rng, 1, 12));
  s.header.quality_index = static_cast<std::uint8_t>(uniform_int(rng, 0, 3));
  for (std::uint32_t g = 0; g < s.header.gop_count(); ++g) {
    c::GopPayload gop;
    gop.objects = random_objects(rng, s.header.width, s.header.height, 4);
    const auto layout = ssvc::partition::build_layout(gop.objects, s.header.stride, s.header.grid_rows(),
                                                      s.header.grid_cols());
    for (std::size_t i = 0; i < gop.objects.size(); ++i) gop.objects[i].region = layout.region_of_object[i];
    for (const c::ChunkEntry& e : c::expected_chunk_order(s.header, g, layout.object_region_count())) {
      std::vector<std::uint8_t> body(static_cast<std::size_t>(uniform_int(rng, 0, 40)));
      for (auto& b : body) b = static_cast<std::uint8_t>(rng());
      gop.chunks.push_back(c::PayloadChunk{e.kind, e.index, e.frame, ssvc::entropy::frame_chunk(body)});
    }
    s.gops.push_back(std::move(gop));
  }
  return s;
}

// Ground-truth centre heatmap: a Gaussian splat per object at its
// low-resolution centre, exactly 1 at the centre cell.
inline ssvc::semantics::Heatmap splat(int rows, int cols, int classes,
                                      const std::vector<std::pair<ssvc::semantics::CellIndex, int>>& centres,
                                      double sigma) {
  ssvc::semantics::Heatmap hm(rows, cols, classes, 0.0);
  for (const auto& [p, cls] : centres) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double d2 = double(c - p.a) * (c - p.a) + double(r - p.b) * (r - p.b);
        hm.at(r, c, cls) = std::max(hm.at(r, c, cls), std::exp(-d2 / (2 * sigma * sigma)));
      }
    }
  }
  return hm;
}

}  // namespace fixture
