#include "ssvc/codec.hpp"

#include <algorithm>
#include <cmath>

#include "ssvc/entropy/plane_coder.hpp"
#include "ssvc/error.hpp"
#include "ssvc/transform.hpp"
#include "parallel.hpp"

namespace ssvc::codec {

namespace {

using container::ChunkKind;

double psnr_of(double mse) { return mse <= 0.0 ? 99.0 : std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / mse)); }

}  // namespace

double lambda_for_quality(int quality) { return static_cast<double>(2048 >> std::clamp(quality, 0, 3)); }

double frame_mse(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) fail(ErrorKind::dimension, "frame size mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (int p = 0; p < kPlaneCount; ++p) {
    const auto& x = a.planes[p].data;
    const auto& y = b.planes[p].data;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = static_cast<double>(x[i]) - y[i];
      sum += d * d;
    }
    n += x.size();
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

partition::RegionLayout gop_layout(const container::GlobalHeader& header,
                                   const container::SemanticHeader& gop) {
  return partition::build_layout(gop.objects, header.stride, header.grid_rows(), header.grid_cols());
}

void decode_region_chunk(std::span<const std::uint8_t> chunk, const container::GlobalHeader& header,
                         const partition::RegionLayout& layout, std::size_t region, LatentGrid& grid) {
  const auto decoded = entropy::decode_region(chunk, transform::latent_geometry(layout.rows, layout.cols),
                                              partition::context_map(layout, region));
  if (decoded.header.step != transform::quantizer_step(header.quality_index)) {
    fail(ErrorKind::format, "region chunk quantizer step disagrees with the stream quality");
  }
  partition::scatter_region(decoded.symbols, layout.regions[region], grid);
}

Frame synthesize_intra(const LatentGrid& grid, const container::GlobalHeader& header,
                       std::span<const std::uint8_t> valid) {
  return transform::synthesis(transform::dequantize_latent(grid, transform::quantizer_step(header.quality_index)),
                              valid);
}

Frame decode_pframe(const Frame& reference, std::span<const std::uint8_t> motion_chunk,
                    std::span<const std::uint8_t> residual_chunk) {
  const auto field = intercode::decompress_motion(motion_chunk, reference.width(), reference.height());
  const FrameF pred = intercode::motion_compensate(reference, field, true);
  const FrameF residual = intercode::decompress_residual(residual_chunk, reference.width(), reference.height());
  return intercode::reconstruct(pred, residual);
}

EncodedGop encode_gop(std::span<const Frame> frames, std::span<const ObjectRecord> objects,
                      const EncoderConfig& cfg, std::uint32_t first_frame) {
  if (frames.empty()) fail(ErrorKind::argument, "empty GoP");
  if (cfg.quality < 0 || cfg.quality >= transform::kQualityLevels) {
    fail(ErrorKind::argument, "quality index must be 0..3");
  }
  const int w = frames[0].width();
  const int h = frames[0].height();
  for (const Frame& f : frames) {
    if (f.width() != w || f.height() != h) fail(ErrorKind::dimension, "frame size changes within the GoP");
  }
  const double step = transform::quantizer_step(cfg.quality);
  const double pixels = static_cast<double>(w) * h;

  EncodedGop out;
  out.payload.objects.assign(objects.begin(), objects.end());

  // I-frame.
  const Frame intra = pad_frame(frames[0], transform::kStride);
  const LatentGrid q = transform::quantize_latent(transform::analysis(intra), step);
  const auto layout = partition::build_layout(out.payload.objects, transform::kStride, q.rows, q.cols);
  for (std::size_t i = 0; i < out.payload.objects.size(); ++i) {
    out.payload.objects[i].region = layout.region_of_object[i];
  }
  const auto geometry = transform::latent_geometry(q.rows, q.cols);
  std::uint64_t intra_bits = 0;
  for (std::size_t k = 0; k < layout.regions.size(); ++k) {
    const bool background = k + 1 == layout.regions.size();
    auto chunk = entropy::encode_region(geometry, partition::context_map(layout, k),
                                        static_cast<std::uint16_t>(step), 0,
                                        partition::gather_region(q, layout.regions[k]));
    intra_bits += chunk.size() * 8;
    out.payload.chunks.push_back(container::PayloadChunk{background ? ChunkKind::background : ChunkKind::object,
                                                         static_cast<std::uint16_t>(background ? 0 : k),
                                                         first_frame, std::move(chunk)});
  }
  Frame reference = transform::synthesis(transform::dequantize_latent(q, step));
  auto record = [&](std::uint32_t index, bool is_intra, std::uint64_t bits, std::uint64_t mbits,
                    std::uint64_t rbits, const Frame& padded) {
    Frame recon = crop_frame(padded, w, h);
    FrameStats s;
    s.frame = first_frame + index;
    s.intra = is_intra;
    s.bits = bits;
    s.motion_bits = mbits;
    s.residual_bits = rbits;
    s.bpp = static_cast<double>(bits) / pixels;
    s.mse = frame_mse(frames[index], recon);
    s.psnr = psnr_of(s.mse);
    out.frames.push_back(s);
    out.reconstruction.push_back(std::move(recon));
  };
  record(0, true, intra_bits, 0, 0, reference);

  // P-frames, predicted from the previous reconstruction.
  intercode::SearchConfig search = cfg.search;
  search.mv_penalty = cfg.mv_penalty >= 0 ? cfg.mv_penalty : static_cast<int>(std::lround(12.0 * std::sqrt(step)));
  for (std::uint32_t t = 1; t < frames.size(); ++t) {
    const Frame current = pad_frame(frames[t], transform::kStride);
    const auto field = intercode::estimate_motion(current, reference, search);
    auto motion = intercode::compress_motion(field, cfg.motion_step);
    const FrameF pred = intercode::motion_compensate(reference, motion.decoded, true);
    auto residual = intercode::compress_residual(current, pred, step, cfg.residual_rounding);
    const std::uint64_t mbits = motion.chunk.size() * 8;
    const std::uint64_t rbits = residual.chunk.size() * 8;
    out.payload.chunks.push_back({ChunkKind::motion, 0, first_frame + t, std::move(motion.chunk)});
    out.payload.chunks.push_back({ChunkKind::residual, 0, first_frame + t, std::move(residual.chunk)});
    reference = std::move(residual.reconstruction);
    record(t, false, mbits + rbits, mbits, rbits, reference);
  }

  double rate = 0.0;
  double distortion = 0.0;
  for (const FrameStats& s : out.frames) {
    rate += s.bpp;
    distortion += s.mse / (255.0 * 255.0);
  }
  out.rd.rate = rate / static_cast<double>(out.frames.size());
  out.rd.distortion = distortion / static_cast<double>(out.frames.size());
  out.rd.lambda = lambda_for_quality(cfg.quality);
  out.rd.cost = out.rd.rate + out.rd.lambda * out.rd.distortion;
  return out;
}

EncodeResult encode_video(std::span<const Frame> frames, const semantics::AnnotationSet* annotations,
                          const EncoderConfig& cfg) {
  if (frames.empty()) fail(ErrorKind::argument, "no frames to encode");
  if (cfg.gop_size < 1 || cfg.gop_size > 255) fail(ErrorKind::capacity, "GoP size must be 1..255");
  const int w = frames[0].width();
  const int h = frames[0].height();
  if (w > 65535 || h > 65535) fail(ErrorKind::capacity, "frame dimensions exceed 16 bits");
  if (frames.size() > 0xFFFFFFFFu) fail(ErrorKind::capacity, "frame count exceeds 32 bits");

  EncodeResult out;
  container::GlobalHeader& header = out.header;
  header.width = static_cast<std::uint16_t>(w);
  header.height = static_cast<std::uint16_t>(h);
  header.frame_count = static_cast<std::uint32_t>(frames.size());
  header.gop_size = static_cast<std::uint8_t>(cfg.gop_size);
  header.stride = transform::kStride;
  header.channels = transform::kChannels;
  header.quality_index = static_cast<std::uint8_t>(cfg.quality);

  const std::uint32_t gops = header.gop_count();
  std::vector<EncodedGop> encoded(gops);
  detail::parallel_for(gops, cfg.threads, [&](std::size_t g) {
    const std::uint32_t first = header.gop_first_frame(static_cast<std::uint32_t>(g));
    const std::uint32_t count = header.gop_frame_count(static_cast<std::uint32_t>(g));
    std::vector<ObjectRecord> objects;
    if (annotations != nullptr) objects = annotations->objects_for(first);
    encoded[g] = encode_gop(frames.subspan(first, count), objects, cfg, first);
  });

  std::vector<container::GopPayload> payloads;
  for (auto& g : encoded) {
    payloads.push_back(std::move(g.payload));
    for (auto& f : g.reconstruction) out.reconstruction.push_back(std::move(f));
    out.frames.insert(out.frames.end(), g.frames.begin(), g.frames.end());
    out.gops.push_back(g.rd);
  }
  out.bytes = container::serialize_stream(header, payloads);
  return out;
}

std::vector<Frame> decode_gop(const container::StreamView& stream, std::uint32_t gop) {
  const auto& header = stream.header.global;
  const auto& sem = stream.header.gops.at(gop);
  const auto layout = gop_layout(header, sem);
  LatentGrid grid(layout.rows, layout.cols, transform::kChannels);
  // Background first: its fill writes into object cells, which the object
  // chunks then overwrite.
  std::vector<std::pair<std::size_t, const container::ChunkEntry*>> regions;
  for (const auto& e : sem.chunks) {
    if (e.kind == ChunkKind::background) regions.insert(regions.begin(), {layout.regions.size() - 1, &e});
    if (e.kind == ChunkKind::object) regions.push_back({e.index, &e});
  }
  for (const auto& [region, entry] : regions) {
    decode_region_chunk(stream.chunk(*entry), header, layout, region, grid);
  }
  Frame reference = synthesize_intra(grid, header);
  std::vector<Frame> out;
  out.push_back(crop_frame(reference, header.width, header.height));
  const container::ChunkEntry* motion = nullptr;
  for (const auto& e : sem.chunks) {
    if (e.kind == ChunkKind::motion) {
      motion = &e;
    } else if (e.kind == ChunkKind::residual) {
      reference = decode_pframe(reference, stream.chunk(*motion), stream.chunk(e));
      out.push_back(crop_frame(reference, header.width, header.height));
    }
  }
  return out;
}

std::vector<Frame> decode_video(std::span<const std::uint8_t> bytes, int threads) {
  const auto stream = container::parse_stream(bytes);
  const auto gops = static_cast<std::uint32_t>(stream.header.gops.size());
  std::vector<std::vector<Frame>> decoded(gops);
  detail::parallel_for(gops, threads, [&](std::size_t g) { decoded[g] = decode_gop(stream, static_cast<std::uint32_t>(g)); });
  std::vector<Frame> out;
  for (auto& g : decoded) {
    for (auto& f : g) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace ssvc::codec
