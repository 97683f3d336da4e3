#include "ssvc/decode_api.hpp"

#include <algorithm>
#include <set>

#include "ssvc/codec.hpp"
#include "ssvc/error.hpp"
#include "ssvc/partition.hpp"
#include "ssvc/transform.hpp"

namespace ssvc::decode {

namespace {

using container::ChunkEntry;
using container::ChunkKind;

class Session {
 public:
  Session(std::span<const std::uint8_t> bytes, const DecodeLimits& limits, bool payload_needed)
      : bytes_(bytes), limits_(limits) {
    if (payload_needed) {
      view_ = container::parse_stream(bytes);
    } else {
      view_.header = container::parse_header_only(bytes);
      view_.bytes = bytes;
    }
    result.header = view_.header;
    result.bits.header_bytes = view_.header.header_bytes;
    result.bits.file_bytes = bytes.size();
  }

  const container::GlobalHeader& global() const { return view_.header.global; }
  const container::SemanticHeader& gop(std::uint32_t g) const { return view_.header.gops[g]; }
  std::uint32_t gop_count() const { return static_cast<std::uint32_t>(view_.header.gops.size()); }

  std::span<const std::uint8_t> read(const ChunkEntry& e, std::uint32_t g) {
    result.bits.chunks.push_back({e, g});
    switch (e.kind) {
      case ChunkKind::object: result.bits.object_bytes += e.length; break;
      case ChunkKind::background: result.bits.background_bytes += e.length; break;
      case ChunkKind::motion: result.bits.motion_bytes += e.length; break;
      case ChunkKind::residual: result.bits.residual_bytes += e.length; break;
    }
    return view_.chunk(e);
  }

  void charge_pixels(std::uint64_t frames) {
    pixels_ += frames * global().width * global().height;
    if (pixels_ > limits_.max_pixels) fail(ErrorKind::capacity, "request exceeds the decode pixel limit");
  }

  const ChunkEntry* find(std::uint32_t g, ChunkKind kind, std::uint32_t frame, std::uint16_t index = 0) const {
    for (const auto& e : gop(g).chunks) {
      if (e.kind == kind && e.frame == frame && e.index == index) return &e;
    }
    return nullptr;
  }

  DecodeResult result;

 private:
  std::span<const std::uint8_t> bytes_;
  container::StreamView view_;
  DecodeLimits limits_;
  std::uint64_t pixels_ = 0;
};

std::vector<std::uint32_t> selected_gops(const Session& s, const DecodeRequest& req) {
  if (req.gop) {
    if (*req.gop >= s.gop_count()) fail(ErrorKind::not_found, "GoP " + std::to_string(*req.gop) + " not present");
    return {*req.gop};
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t g = 0; g < s.gop_count(); ++g) out.push_back(g);
  return out;
}

// Decodes the chosen regions of a GoP's i-frame; valid covers exactly their
// coded cells.
void decode_intra_regions(Session& s, std::uint32_t g, const std::vector<std::size_t>& regions) {
  const auto& header = s.global();
  const auto layout = codec::gop_layout(header, s.gop(g));
  const std::size_t bg = layout.regions.size() - 1;
  LatentGrid grid(layout.rows, layout.cols, transform::kChannels);
  std::vector<std::uint8_t> valid(static_cast<std::size_t>(grid.cell_count()), 0);
  std::vector<std::size_t> order = regions;
  std::stable_sort(order.begin(), order.end(), [bg](std::size_t a, std::size_t b) { return (a == bg) > (b == bg); });
  const std::uint32_t frame = header.gop_first_frame(g);
  for (std::size_t region : order) {
    const ChunkEntry* e = region == bg ? s.find(g, ChunkKind::background, frame)
                                       : s.find(g, ChunkKind::object, frame, static_cast<std::uint16_t>(region));
    if (e == nullptr) fail(ErrorKind::not_found, "region chunk missing");
    codec::decode_region_chunk(s.read(*e, g), header, layout, region, grid);
    for (std::int32_t cell : layout.regions[region].cells) valid[static_cast<std::size_t>(cell)] = 1;
  }
  s.charge_pixels(1);
  PartialFrame pf;
  pf.frame = frame;
  pf.image = crop_frame(codec::synthesize_intra(grid, header, valid), header.width, header.height);
  pf.valid = crop_mask(transform::cell_mask_to_pixels(valid, layout.rows, layout.cols), header.width, header.height);
  s.result.frames.push_back(std::move(pf));
}

std::vector<std::size_t> object_regions(Session& s, std::uint32_t g, const DecodeRequest& req,
                                        bool require_each) {
  const auto& objects = s.gop(g).objects;
  std::set<std::size_t> regions;
  auto select = [&](std::uint16_t k) {
    regions.insert(objects[k].region);
    s.result.objects.push_back({g, k, objects[k]});
  };
  for (std::uint16_t k : req.objects) {
    if (k >= objects.size()) {
      if (require_each) {
        fail(ErrorKind::not_found, "object " + std::to_string(k) + " not present in GoP " + std::to_string(g));
      }
      continue;
    }
    select(k);
  }
  for (std::size_t k = 0; k < objects.size(); ++k) {
    if (std::find(req.classes.begin(), req.classes.end(), objects[k].class_id) != req.classes.end()) {
      select(static_cast<std::uint16_t>(k));
    }
  }
  return {regions.begin(), regions.end()};
}

bool in_range(const DecodeRequest& req, std::uint32_t frame) {
  return frame >= req.first_frame && frame <= req.last_frame;
}

void decode_motion(Session& s, std::uint32_t g, const DecodeRequest* range) {
  const auto& h = s.global();
  const int w = padded_size(h.width, transform::kStride);
  const int ht = padded_size(h.height, transform::kStride);
  for (const auto& e : s.gop(g).chunks) {
    if (e.kind != ChunkKind::motion || (range != nullptr && !in_range(*range, e.frame))) continue;
    s.result.motion.push_back({e.frame, intercode::decompress_motion(s.read(e, g), w, ht)});
  }
}

void decode_full(Session& s, const DecodeRequest& req) {
  const auto& h = s.global();
  bool any = false;
  for (std::uint32_t g = 0; g < s.gop_count(); ++g) {
    const std::uint32_t first = h.gop_first_frame(g);
    const std::uint32_t count = h.gop_frame_count(g);
    if (req.last_frame < first || req.first_frame >= first + count) continue;
    any = true;
    // Frames before the range are still needed as references.
    const std::uint32_t stop = std::min<std::uint64_t>(req.last_frame, first + count - 1u);
    s.charge_pixels(stop - first + 1);
    const auto layout = codec::gop_layout(h, s.gop(g));
    LatentGrid grid(layout.rows, layout.cols, transform::kChannels);
    const std::size_t bg = layout.regions.size() - 1;
    codec::decode_region_chunk(s.read(*s.find(g, ChunkKind::background, first), g), h, layout, bg, grid);
    for (std::size_t k = 0; k < bg; ++k) {
      const ChunkEntry* e = s.find(g, ChunkKind::object, first, static_cast<std::uint16_t>(k));
      codec::decode_region_chunk(s.read(*e, g), h, layout, k, grid);
    }
    Frame reference = codec::synthesize_intra(grid, h);
    auto emit = [&](std::uint32_t frame) {
      if (!in_range(req, frame)) return;
      PartialFrame pf;
      pf.frame = frame;
      pf.image = crop_frame(reference, h.width, h.height);
      pf.valid = Mask(h.width, h.height, 1);
      s.result.frames.push_back(std::move(pf));
    };
    emit(first);
    for (std::uint32_t f = first + 1; f <= stop; ++f) {
      const auto motion = s.read(*s.find(g, ChunkKind::motion, f), g);
      const auto residual = s.read(*s.find(g, ChunkKind::residual, f), g);
      reference = codec::decode_pframe(reference, motion, residual);
      emit(f);
    }
  }
  if (!any) fail(ErrorKind::not_found, "no frames in the requested range");
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::header: return "header";
    case Mode::objects: return "objects";
    case Mode::background: return "background";
    case Mode::motion: return "motion";
    case Mode::residual: return "residual";
    case Mode::object_tube: return "tube";
    case Mode::full: return "full";
  }
  return "?";
}

DecodeResult decode(std::span<const std::uint8_t> bytes, const DecodeRequest& req, const DecodeLimits& limits) {
  if (req.first_frame > req.last_frame) fail(ErrorKind::argument, "empty frame range");
  Session s(bytes, limits, req.mode != Mode::header);
  switch (req.mode) {
    case Mode::header:
      for (std::uint32_t g = 0; g < s.gop_count(); ++g) {
        const auto& objects = s.gop(g).objects;
        for (std::size_t k = 0; k < objects.size(); ++k) {
          s.result.objects.push_back({g, static_cast<std::uint16_t>(k), objects[k]});
        }
      }
      break;
    case Mode::objects: {
      if (req.objects.empty() && req.classes.empty()) fail(ErrorKind::argument, "no objects or classes requested");
      const auto gops = selected_gops(s, req);
      for (std::uint32_t g : gops) {
        const auto regions = object_regions(s, g, req, req.gop.has_value());
        if (!regions.empty()) decode_intra_regions(s, g, regions);
      }
      if (s.result.objects.empty()) fail(ErrorKind::not_found, "no matching objects in the stream");
      break;
    }
    case Mode::background:
      for (std::uint32_t g : selected_gops(s, req)) {
        decode_intra_regions(s, g, {codec::gop_layout(s.global(), s.gop(g)).regions.size() - 1});
      }
      break;
    case Mode::motion:
    case Mode::residual: {
      const auto& h = s.global();
      for (std::uint32_t g = 0; g < s.gop_count(); ++g) {
        if (req.mode == Mode::motion) {
          decode_motion(s, g, &req);
          continue;
        }
        for (const auto& e : s.gop(g).chunks) {
          if (e.kind != ChunkKind::residual || !in_range(req, e.frame)) continue;
          s.charge_pixels(1);
          s.result.residuals.push_back({e.frame, intercode::decompress_residual(
                                                     s.read(e, g), padded_size(h.width, transform::kStride),
                                                     padded_size(h.height, transform::kStride))});
        }
      }
      if (s.result.motion.empty() && s.result.residuals.empty()) {
        fail(ErrorKind::not_found, std::string("no ") + to_string(req.mode) + " chunks in the requested range");
      }
      break;
    }
    case Mode::object_tube: {
      if (req.objects.size() != 1) fail(ErrorKind::argument, "an object tube names exactly one object");
      const std::uint32_t g = req.gop.value_or(0);
      if (g >= s.gop_count()) fail(ErrorKind::not_found, "GoP " + std::to_string(g) + " not present");
      DecodeRequest one;
      one.objects = req.objects;
      decode_intra_regions(s, g, object_regions(s, g, one, true));
      decode_motion(s, g, nullptr);
      break;
    }
    case Mode::full:
      decode_full(s, req);
      break;
  }
  return std::move(s.result);
}

double savings_report(std::span<const std::uint8_t> bytes, const DecodeRequest& request) {
  return decode(bytes, request).bits.fraction();
}

}  // namespace ssvc::decode
