#pragma once

// GoP orchestration: intra coding of the first frame through the region
// layout, then closed-loop p-frames (each predicted from the previous
// reconstruction). Frames are coded at their size padded to multiples of 16
// and cropped on output.

#include <cstdint>
#include <span>
#include <vector>

#include "ssvc/container.hpp"
#include "ssvc/frame.hpp"
#include "ssvc/intercode.hpp"
#include "ssvc/partition.hpp"
#include "ssvc/semantics.hpp"

namespace ssvc::codec {

struct EncoderConfig {
  int gop_size = 10;
  int quality = 0;
  intercode::SearchConfig search;
  int motion_step = 1;  // 1 = lossless motion
  // Inter residual rounding offset (dead zone); 0.5 is plain rounding.
  double residual_rounding = 1.0 / 6.0;
  // Motion vector penalty; negative derives it from the quantizer step as
  // round(12 * sqrt(step)).
  int mv_penalty = -1;
  int threads = 0;      // 0 = hardware concurrency
};

// Lagrange multiplier label of a quality index: 2048, 1024, 512, 256.
double lambda_for_quality(int quality);

struct FrameStats {
  std::uint32_t frame = 0;
  bool intra = false;
  std::uint64_t bits = 0;  // payload bits of the frame's chunks
  std::uint64_t motion_bits = 0;
  std::uint64_t residual_bits = 0;
  double bpp = 0.0;
  double mse = 0.0;  // all planes pooled
  double psnr = 0.0;
};

// Rate-distortion cost of a GoP: mean bpp + lambda * mean(mse / 255^2).
struct GopCost {
  double rate = 0.0;
  double distortion = 0.0;
  double lambda = 0.0;
  double cost = 0.0;
};

struct EncodedGop {
  container::GopPayload payload;
  std::vector<Frame> reconstruction;
  std::vector<FrameStats> frames;
  GopCost rd;
};

// `objects` are the annotations of the GoP's first frame; their region
// fields are assigned here.
EncodedGop encode_gop(std::span<const Frame> frames, std::span<const ObjectRecord> objects,
                      const EncoderConfig& cfg, std::uint32_t first_frame = 0);

struct EncodeResult {
  container::GlobalHeader header;
  std::vector<std::uint8_t> bytes;
  std::vector<Frame> reconstruction;
  std::vector<FrameStats> frames;
  std::vector<GopCost> gops;
};

// Annotations may be null. GoPs are encoded in parallel.
EncodeResult encode_video(std::span<const Frame> frames, const semantics::AnnotationSet* annotations,
                          const EncoderConfig& cfg);

// Building blocks shared with partial decoding.

partition::RegionLayout gop_layout(const container::GlobalHeader& header,
                                   const container::SemanticHeader& gop);

// Entropy-decodes one region chunk into `grid` (background fill included).
// Throws Error{format} if the chunk's quantizer step disagrees with the header.
void decode_region_chunk(std::span<const std::uint8_t> chunk, const container::GlobalHeader& header,
                         const partition::RegionLayout& layout, std::size_t region, LatentGrid& grid);

// Padded-size intra picture; cells with valid == 0 are mid-gray.
Frame synthesize_intra(const LatentGrid& grid, const container::GlobalHeader& header,
                       std::span<const std::uint8_t> valid = {});

// Padded-size p-frame reconstruction.
Frame decode_pframe(const Frame& reference, std::span<const std::uint8_t> motion_chunk,
                    std::span<const std::uint8_t> residual_chunk);

// Full decode of one GoP / the whole stream, cropped to the frame size.
std::vector<Frame> decode_gop(const container::StreamView& stream, std::uint32_t gop);
std::vector<Frame> decode_video(std::span<const std::uint8_t> bytes, int threads = 0);

double frame_mse(const Frame& a, const Frame& b);

}  // namespace ssvc::codec
