#pragma once

// Region-wise coding of a quantized latent plane: the Gaussian-conditional
// model with a causal mean and per-tile scale side information.
//
// Chunk payload (one range-coded stream):
//   16 bits   quantizer step
//    8 bits   auxiliary parameter (motion block size for motion chunks, else 0)
//   16 bits   bound V = max |symbol| of the chunk
//   if V > 0 and the region is not empty:
//     scale side info: for each 8x8-cell tile touched by the region (ascending
//     tile index), for each band: one log-scale index s in [-8, 23] coded with
//     the factorized prior; sigma = 2^(s/2)
//     symbols: channel-major, then the region's coded cells in row-major order,
//     each coded as a Gaussian bin with mean from the causal context and the
//     sigma of its (tile, band), alphabet [-V, V].

#include <cstdint>
#include <span>
#include <vector>

namespace ssvc::entropy {

struct LatentGeometry {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  int bands = 0;
  std::vector<std::uint16_t> band_of_channel;

  int cell_count() const { return rows * cols; }
};

// Which grid cells a chunk codes, and which cells may serve as causal context.
struct ContextMap {
  int rows = 0;
  int cols = 0;
  std::vector<std::int32_t> coded;  // coded cell ids, ascending (row-major)
  // Per grid cell: the cell whose decoded value stands for it (itself when
  // coded, the fill source when filled), or -1 when it is never available.
  std::vector<std::int32_t> alias;

  static ContextMap full(int rows, int cols);
};

inline constexpr int kScaleTileCells = 8;
inline constexpr int kScaleIndexMin = -8;
inline constexpr int kScaleIndexMax = 23;

struct RegionStreamHeader {
  std::uint16_t step = 1;
  std::uint8_t aux = 0;
  std::int32_t bound = 0;
};

double scale_from_index(int s);
int scale_index_for_mean_square(double mean_square);

// Mean prediction at `cell` for one channel given the values decoded so far.
// `decoded[c]` is non-zero once grid cell c holds a value in `values`.
double region_causal_predict(const ContextMap& ctx, std::span<const std::int32_t> values,
                             std::span<const std::uint8_t> decoded, int cell);

// symbols: cell-major (coded cell k, channel c) at k * channels + c.
// Returns a framed, checksummed chunk.
std::vector<std::uint8_t> encode_region(const LatentGeometry& geometry, const ContextMap& ctx,
                                        std::uint16_t step, std::uint8_t aux,
                                        std::span<const std::int32_t> symbols);

RegionStreamHeader peek_region_header(std::span<const std::uint8_t> chunk);

struct DecodedRegion {
  RegionStreamHeader header;
  std::vector<std::int32_t> symbols;  // same layout as encode_region's input
};

DecodedRegion decode_region(std::span<const std::uint8_t> chunk, const LatentGeometry& geometry,
                            const ContextMap& ctx);

}  // namespace ssvc::entropy
