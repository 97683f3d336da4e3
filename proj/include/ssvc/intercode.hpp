#pragma once

// P-frame tools: block-matching motion estimation, motion field coding,
// bilinear motion compensation with boundary refinement, residual coding.

#include <cstdint>
#include <span>
#include <vector>

#include "ssvc/frame.hpp"

namespace ssvc::intercode {

// Per-block motion in quarter-pel units on a B x B block grid (luma).
// The block at (r, c) is predicted from the reference displaced by
// (dx, dy) / 4 pixels.
struct MotionField {
  int block = 8;
  int rows = 0;
  int cols = 0;
  std::vector<std::int32_t> dx;
  std::vector<std::int32_t> dy;

  MotionField() = default;
  MotionField(int rows_, int cols_, int block_)
      : block(block_),
        rows(rows_),
        cols(cols_),
        dx(static_cast<std::size_t>(rows_) * cols_, 0),
        dy(static_cast<std::size_t>(rows_) * cols_, 0) {}

  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols + c; }
  bool is_zero() const;
  bool operator==(const MotionField&) const = default;
};

struct SearchConfig {
  int block = 8;
  int range = 16;           // pixels
  bool exhaustive = true;  // full search; false = diamond pattern (faster, may stall)
  bool subpel = true;       // half- then quarter-pel refinement
  // Rate proxy added to the matching cost: SAD units per pixel of distance
  // (L1) from the nearer of the zero vector and the mean of the left and
  // upper neighbours' vectors. 0 = pure SAD.
  int mv_penalty = 0;
};

// Luma block matching. Dimensions must be equal and multiples of the block.
// Integer search minimises SAD (plus the vector penalty) with ties going to
// the shorter vector, so the zero vector wins any tie it takes part in;
// sub-pel steps move only on a strict improvement.
MotionField estimate_motion(const Frame& current, const Frame& reference, const SearchConfig& cfg);

// Integer SAD of one block at displacement (ix, iy) pixels, samples outside
// the reference replicated from its edge.
std::uint32_t block_sad(const Plane& current, const Plane& reference, int bx, int by, int block,
                        int ix, int iy);

// Bilinear prediction with edge clamping; chroma uses the luma vector halved
// (eighth-pel on the chroma grid). With `refine`, samples on either side of a
// boundary between blocks with different vectors are replaced by the 3x3 mean
// of the unrefined prediction.
FrameF motion_compensate(const Frame& reference, const MotionField& field, bool refine = true);

struct CodedMotion {
  std::vector<std::uint8_t> chunk;
  MotionField decoded;
};

// step 1 codes the quarter-pel integers losslessly.
CodedMotion compress_motion(const MotionField& field, int step = 1);

// The block size travels in the chunk; the frame size fixes the grid shape.
MotionField decompress_motion(std::span<const std::uint8_t> chunk, int frame_width, int frame_height);

struct CodedResidual {
  std::vector<std::uint8_t> chunk;
  Frame reconstruction;
};

// Frame sizes must be multiples of 16. Coefficients are quantized as
// sign(x) * floor(|x| / step + rounding); 0.5 is plain rounding, smaller
// values widen the zero bin.
CodedResidual compress_residual(const Frame& current, const FrameF& predicted, double step,
                                double rounding = 0.5);
FrameF decompress_residual(std::span<const std::uint8_t> chunk, int frame_width, int frame_height);

// clamp(round(predicted + residual)).
Frame reconstruct(const FrameF& predicted, const FrameF& residual);

}  // namespace ssvc::intercode
