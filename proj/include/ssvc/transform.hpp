#pragma once

// Deterministic analysis / synthesis transform pair. Each latent cell holds
// the orthonormal 2-D DCT coefficients of one 16x16 luma block and the two
// co-sited 8x8 chroma blocks: 256 + 64 + 64 = 384 channels.

#include <cstdint>
#include <span>
#include <vector>

#include "ssvc/entropy/plane_coder.hpp"
#include "ssvc/frame.hpp"

namespace ssvc::transform {

inline constexpr int kStride = 16;
inline constexpr int kChromaBlock = kStride / 2;
inline constexpr int kLumaChannels = kStride * kStride;
inline constexpr int kChromaChannels = kChromaBlock * kChromaBlock;
inline constexpr int kChannels = kLumaChannels + 2 * kChromaChannels;
inline constexpr int kQualityLevels = 4;

enum class TransformId : std::uint8_t { block_dct = 1 };

struct TransformSpec {
  TransformId id = TransformId::block_dct;
  int stride = kStride;
  int channels = kChannels;
  double step = 4.0;

  // Quantizer ladder 4, 8, 16, 32 for quality 0..3.
  static TransformSpec for_quality(int quality);
};

double quantizer_step(int quality);

// Coding geometry for a rows x cols latent grid. Bands group channels by
// zig-zag diagonal (u + v) per plane: 31 luma bands then 15 per chroma plane.
entropy::LatentGeometry latent_geometry(int rows, int cols);

// Orthonormal DCT-II basis, row k = frequency k. Built with deterministic
// arithmetic; identical on every platform.
const std::vector<double>& dct_matrix(int n);

// Pixels are centred by -128 before the forward transform. The frame must
// already be padded to multiples of the stride.
LatentPlane analysis(const Frame& frame);

// Inverse transform, +128, rounded and clamped to [0, 255]. Cells whose
// `valid` entry is 0 are rendered mid-gray (128) in every plane. `valid` may
// be empty (all cells valid).
Frame synthesis(const LatentPlane& latent, std::span<const std::uint8_t> valid = {});

// Signed residual variants: no centring, no rounding or clamping.
LatentPlane analysis_residual(const FrameF& residual);
FrameF synthesis_residual(const LatentPlane& latent);

LatentGrid quantize_latent(const LatentPlane& latent, double step, std::size_t* clamped = nullptr);
LatentPlane dequantize_latent(const LatentGrid& grid, double step);

// Luma-resolution mask with 1 on every pixel of a valid cell's block.
Mask cell_mask_to_pixels(std::span<const std::uint8_t> valid, int rows, int cols);

}  // namespace ssvc::transform
