#pragma once

// Checks every partial-decode mode of a stream against the full decode and
// against byte accounting derived directly from the chunk table.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ssvc/container.hpp"
#include "ssvc/decode_api.hpp"
#include "ssvc/error.hpp"
#include "ssvc/intercode.hpp"

namespace consistency {

using namespace ssvc;

struct Report {
  std::vector<std::string> failures;
  int requests = 0;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 20) failures.push_back(what);
  }
};

inline std::size_t expected_bytes(const container::ParsedHeader& h,
                                  const std::vector<std::pair<std::uint32_t, container::ChunkEntry>>& chunks) {
  std::size_t n = h.header_bytes;
  for (const auto& [g, e] : chunks) n += e.length;
  return n;
}

// Chunks of a GoP selected by a predicate, in table order.
template <typename Pred>
std::vector<std::pair<std::uint32_t, container::ChunkEntry>> select(const container::ParsedHeader& h,
                                                                    std::uint32_t g, Pred pred) {
  std::vector<std::pair<std::uint32_t, container::ChunkEntry>> out;
  for (const auto& e : h.gops[g].chunks) {
    if (pred(e)) out.push_back({g, e});
  }
  return out;
}

// Pixels marked valid equal the reference; the rest are mid-gray.
inline bool matches_restriction(const decode::PartialFrame& part, const Frame& full) {
  const Mask& m = part.valid;
  for (int p = 0; p < kPlaneCount; ++p) {
    const int s = p == 0 ? 1 : 2;
    const auto& got = part.image.planes[p];
    for (int y = 0; y < got.height; ++y) {
      for (int x = 0; x < got.width; ++x) {
        const bool valid = m.at(std::min(x * s, m.width - 1), std::min(y * s, m.height - 1)) != 0;
        const std::uint8_t want = valid ? full.planes[p].at(x, y) : 128;
        if (got.at(x, y) != want) return false;
      }
    }
  }
  return true;
}

// Expected validity mask: the latent cells of the chosen regions.
inline Mask region_mask(const container::GlobalHeader& gh, const container::SemanticHeader& sem,
                        const std::set<std::size_t>& regions, bool background) {
  const int rows = gh.grid_rows();
  const int cols = gh.grid_cols();
  std::vector<oracle::Box> boxes;
  for (const auto& o : sem.objects) {
    const CellBox c = o.latent(gh.stride, rows, cols);
    boxes.push_back({c.col0, c.row0, c.col1, c.row1});
  }
  const auto layout = oracle::layout(boxes, rows, cols);
  std::set<int> cells;
  for (std::size_t r : regions) cells.insert(layout.regions[r].begin(), layout.regions[r].end());
  if (background) cells.insert(layout.regions.back().begin(), layout.regions.back().end());
  Mask m(gh.width, gh.height, 0);
  for (int y = 0; y < gh.height; ++y) {
    for (int x = 0; x < gh.width; ++x) {
      m.at(x, y) = cells.count((y / gh.stride) * cols + x / gh.stride) ? 1 : 0;
    }
  }
  return m;
}

inline Report check_modes(const std::vector<std::uint8_t>& bytes) {
  Report rep;
  const auto view = container::parse_stream(bytes);
  const auto& ph = view.header;
  const auto& gh = ph.global;
  const bool aligned = gh.width % 16 == 0 && gh.height % 16 == 0;

  decode::DecodeRequest full_req;
  const auto full = decode::decode(bytes, full_req);
  ++rep.requests;
  rep.expect(full.frames.size() == gh.frame_count, "full: frame count");
  rep.expect(full.bits.bytes_read() == bytes.size(), "full: bytes read != file size");
  rep.expect(full.bits.chunks.size() ==
                 [&] {
                   std::size_t n = 0;
                   for (const auto& g : ph.gops) n += g.chunks.size();
                   return n;
                 }(),
             "full: chunk count");
  std::vector<Frame> F;
  for (const auto& f : full.frames) F.push_back(f.image);

  // Header only.
  {
    decode::DecodeRequest r;
    r.mode = decode::Mode::header;
    const auto res = decode::decode(bytes, r);
    ++rep.requests;
    rep.expect(res.bits.bytes_read() == ph.header_bytes && res.bits.chunks.empty(), "header: bytes");
    std::size_t n = 0;
    for (const auto& g : ph.gops) n += g.objects.size();
    rep.expect(res.objects.size() == n, "header: object list");
    // A bare header prefix answers the same request.
    const auto prefix = decode::decode(std::span(bytes).first(ph.header_bytes), r);
    rep.expect(prefix.objects.size() == n, "header: prefix-only decode");
  }

  for (std::uint32_t g = 0; g < ph.gops.size(); ++g) {
    const auto& sem = ph.gops[g];
    const std::uint32_t first = gh.gop_first_frame(g);
    // Each object alone, and as a tube.
    for (std::uint16_t k = 0; k < sem.objects.size(); ++k) {
      const std::uint16_t region = sem.objects[k].region;
      auto is_region = [&](const container::ChunkEntry& e) {
        return e.kind == container::ChunkKind::object && e.index == region;
      };
      decode::DecodeRequest r;
      r.mode = decode::Mode::objects;
      r.objects = {k};
      r.gop = g;
      const auto res = decode::decode(bytes, r);
      ++rep.requests;
      const auto want = select(ph, g, is_region);
      rep.expect(res.bits.bytes_read() == expected_bytes(ph, want), "objects: bytes");
      rep.expect(res.frames.size() == 1 && res.frames[0].frame == first, "objects: frame");
      if (!res.frames.empty()) {
        rep.expect(res.frames[0].valid == region_mask(gh, sem, {region}, false), "objects: mask");
        rep.expect(matches_restriction(res.frames[0], F[first]), "objects: pixels");
      }
      rep.expect(res.objects.size() == 1 && res.objects[0].record == sem.objects[k], "objects: record");

      r.mode = decode::Mode::object_tube;
      const auto tube = decode::decode(bytes, r);
      ++rep.requests;
      auto tube_want = want;
      for (const auto& m : select(ph, g, [](const auto& e) { return e.kind == container::ChunkKind::motion; })) {
        tube_want.push_back(m);
      }
      rep.expect(tube.bits.bytes_read() == expected_bytes(ph, tube_want), "tube: bytes");
      rep.expect(tube.motion.size() + 1 == gh.gop_frame_count(g), "tube: motion count");
      rep.expect(!tube.frames.empty() && matches_restriction(tube.frames[0], F[first]), "tube: pixels");
    }
    // Class filter.
    std::map<std::uint16_t, std::set<std::size_t>> by_class;
    for (const auto& o : sem.objects) by_class[o.class_id].insert(o.region);
    for (const auto& [cls, regions] : by_class) {
      decode::DecodeRequest r;
      r.mode = decode::Mode::objects;
      r.classes = {cls};
      r.gop = g;
      const auto res = decode::decode(bytes, r);
      ++rep.requests;
      const auto want = select(ph, g, [&](const auto& e) {
        return e.kind == container::ChunkKind::object && regions.count(e.index);
      });
      rep.expect(res.bits.bytes_read() == expected_bytes(ph, want), "class: bytes");
      rep.expect(!res.frames.empty() && res.frames[0].valid == region_mask(gh, sem, regions, false), "class: mask");
      rep.expect(!res.frames.empty() && matches_restriction(res.frames[0], F[first]), "class: pixels");
    }
    // Background.
    {
      decode::DecodeRequest r;
      r.mode = decode::Mode::background;
      r.gop = g;
      const auto res = decode::decode(bytes, r);
      ++rep.requests;
      const auto want = select(ph, g, [](const auto& e) { return e.kind == container::ChunkKind::background; });
      rep.expect(res.bits.bytes_read() == expected_bytes(ph, want), "background: bytes");
      rep.expect(res.frames.size() == 1 && res.frames[0].valid == region_mask(gh, sem, {}, true), "background: mask");
      rep.expect(!res.frames.empty() && matches_restriction(res.frames[0], F[first]), "background: pixels");
    }
  }

  // Motion and residual over the whole stream and a sub-range.
  const std::uint32_t last = gh.frame_count - 1;
  for (const auto& [a, b] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, last}, {last / 3, (2 * last) / 3}}) {
    std::vector<std::pair<std::uint32_t, container::ChunkEntry>> mw, rw;
    for (std::uint32_t g = 0; g < ph.gops.size(); ++g) {
      for (const auto& x : select(ph, g, [&](const auto& e) {
             return e.kind == container::ChunkKind::motion && e.frame >= a && e.frame <= b;
           })) {
        mw.push_back(x);
      }
      for (const auto& x : select(ph, g, [&](const auto& e) {
             return e.kind == container::ChunkKind::residual && e.frame >= a && e.frame <= b;
           })) {
        rw.push_back(x);
      }
    }
    decode::DecodeRequest r;
    r.first_frame = a;
    r.last_frame = b;
    r.mode = decode::Mode::motion;
    if (mw.empty()) {
      bool not_found = false;
      try {
        decode::decode(bytes, r);
      } catch (const Error& e) {
        not_found = e.kind() == ErrorKind::not_found;
      }
      ++rep.requests;
      rep.expect(not_found, "motion: empty range must be not-found");
      continue;
    }
    const auto mres = decode::decode(bytes, r);
    r.mode = decode::Mode::residual;
    const auto rres = decode::decode(bytes, r);
    rep.requests += 2;
    rep.expect(mres.bits.bytes_read() == expected_bytes(ph, mw), "motion: bytes");
    rep.expect(rres.bits.bytes_read() == expected_bytes(ph, rw), "residual: bytes");
    rep.expect(mres.motion.size() == mw.size() && rres.residuals.size() == rw.size(), "motion/residual: counts");
    for (std::size_t i = 0; i < mres.motion.size() && i < rres.residuals.size(); ++i) {
      const auto& m = mres.motion[i];
      const auto& chunk = view.chunk(mw[i].second);
      rep.expect(m.frame == mw[i].second.frame, "motion: frame order");
      rep.expect(m.field == intercode::decompress_motion(chunk, padded_size(gh.width, 16), padded_size(gh.height, 16)),
                 "motion: field");
      if (aligned) {
        // The partial streams rebuild the full decode exactly.
        const Frame rebuilt = intercode::reconstruct(intercode::motion_compensate(F[m.frame - 1], m.field),
                                                     rres.residuals[i].residual);
        rep.expect(rebuilt == F[m.frame], "motion+residual: reconstruction of frame " + std::to_string(m.frame));
      }
    }

    r.mode = decode::Mode::full;
    const auto part = decode::decode(bytes, r);
    ++rep.requests;
    std::vector<std::pair<std::uint32_t, container::ChunkEntry>> fw;
    for (std::uint32_t g = 0; g < ph.gops.size(); ++g) {
      const std::uint32_t f0 = gh.gop_first_frame(g);
      if (f0 > b || f0 + gh.gop_frame_count(g) <= a) continue;
      for (const auto& x : select(ph, g, [&](const auto& e) { return e.frame <= b; })) fw.push_back(x);
    }
    rep.expect(part.bits.bytes_read() == expected_bytes(ph, fw), "full range: bytes");
    rep.expect(part.frames.size() == b - a + 1, "full range: frame count");
    for (const auto& f : part.frames) rep.expect(f.image == F[f.frame], "full range: pixels");
  }

  // Absent selectors.
  auto expect_not_found = [&](decode::DecodeRequest r, const char* what) {
    bool ok = false;
    try {
      decode::decode(bytes, r);
    } catch (const Error& e) {
      ok = e.kind() == ErrorKind::not_found;
    }
    ++rep.requests;
    rep.expect(ok, what);
  };
  decode::DecodeRequest absent;
  absent.mode = decode::Mode::objects;
  absent.objects = {static_cast<std::uint16_t>(ph.gops[0].objects.size())};
  absent.gop = 0;
  expect_not_found(absent, "objects: absent index");
  absent.mode = decode::Mode::object_tube;
  expect_not_found(absent, "tube: absent index");
  absent.mode = decode::Mode::background;
  absent.gop = static_cast<std::uint32_t>(ph.gops.size());
  expect_not_found(absent, "background: absent GoP");
  decode::DecodeRequest late;
  late.first_frame = gh.frame_count;
  expect_not_found(late, "full: absent frames");
  return rep;
}

}  // namespace consistency
