#include "ssvc/entropy/plane_coder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ssvc/entropy/models.hpp"
#include "ssvc/error.hpp"

namespace ssvc::entropy {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

struct TileIndex {
  std::vector<std::int32_t> slot_of_cell;  // per coded cell k
  std::size_t slots = 0;
};

TileIndex index_tiles(const ContextMap& ctx) {
  const int tile_cols = (ctx.cols + kScaleTileCells - 1) / kScaleTileCells;
  std::vector<std::int32_t> tile_of_cell(ctx.coded.size());
  std::vector<std::int32_t> touched;
  for (std::size_t k = 0; k < ctx.coded.size(); ++k) {
    const int cell = ctx.coded[k];
    const int tile = (cell / ctx.cols / kScaleTileCells) * tile_cols +
                     (cell % ctx.cols) / kScaleTileCells;
    tile_of_cell[k] = tile;
    touched.push_back(tile);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  TileIndex index;
  index.slots = touched.size();
  index.slot_of_cell.resize(ctx.coded.size());
  for (std::size_t k = 0; k < ctx.coded.size(); ++k) {
    index.slot_of_cell[k] = static_cast<std::int32_t>(
        std::lower_bound(touched.begin(), touched.end(), tile_of_cell[k]) - touched.begin());
  }
  return index;
}

void check_context(const LatentGeometry& geometry, const ContextMap& ctx) {
  if (geometry.rows != ctx.rows || geometry.cols != ctx.cols) {
    fail(ErrorKind::dimension, "context map does not match latent geometry");
  }
  if (ctx.alias.size() != static_cast<std::size_t>(ctx.rows) * ctx.cols) {
    fail(ErrorKind::dimension, "context alias map has wrong size");
  }
  if (static_cast<int>(geometry.band_of_channel.size()) != geometry.channels) {
    fail(ErrorKind::dimension, "band map must cover every channel");
  }
}

}  // namespace

ContextMap ContextMap::full(int rows, int cols) {
  ContextMap ctx;
  ctx.rows = rows;
  ctx.cols = cols;
  ctx.coded.resize(static_cast<std::size_t>(rows) * cols);
  ctx.alias.resize(ctx.coded.size());
  for (std::size_t i = 0; i < ctx.coded.size(); ++i) {
    ctx.coded[i] = static_cast<std::int32_t>(i);
    ctx.alias[i] = static_cast<std::int32_t>(i);
  }
  return ctx;
}

double scale_from_index(int s) {
  if (s % 2 == 0) return std::ldexp(1.0, s / 2);
  return std::ldexp(kSqrt2, (s - 1) / 2);
}

int scale_index_for_mean_square(double mean_square) {
  // Nearest s in the log domain: 2^(s - 1/2) <= mean_square < 2^(s + 1/2).
  int s = kScaleIndexMin;
  while (s < kScaleIndexMax && mean_square >= std::ldexp(kSqrt2, s)) ++s;
  return s;
}

double region_causal_predict(const ContextMap& ctx, std::span<const std::int32_t> values,
                             std::span<const std::uint8_t> decoded, int cell) {
  const int row = cell / ctx.cols;
  const int col = cell % ctx.cols;
  double sum = 0.0;
  int count = 0;
  auto take = [&](int neighbour) {
    const std::int32_t a = ctx.alias[static_cast<std::size_t>(neighbour)];
    if (a >= 0 && decoded[static_cast<std::size_t>(a)] != 0) {
      sum += values[static_cast<std::size_t>(a)];
      ++count;
    }
  };
  if (col > 0) take(cell - 1);
  if (row > 0) take(cell - ctx.cols);
  return count == 0 ? 0.0 : sum / count;
}

std::vector<std::uint8_t> encode_region(const LatentGeometry& geometry, const ContextMap& ctx,
                                        std::uint16_t step, std::uint8_t aux,
                                        std::span<const std::int32_t> symbols) {
  check_context(geometry, ctx);
  const std::size_t n_cells = ctx.coded.size();
  const auto channels = static_cast<std::size_t>(geometry.channels);
  if (symbols.size() != n_cells * channels) {
    fail(ErrorKind::layout, "region has " + std::to_string(n_cells * channels) +
                                " symbols, got " + std::to_string(symbols.size()));
  }
  std::int32_t bound = 0;
  for (std::int32_t s : symbols) bound = std::max(bound, std::abs(s));
  if (bound > kMaxBound) {
    fail(ErrorKind::capacity, "symbol magnitude " + std::to_string(bound) + " exceeds coder range");
  }

  RangeEncoder enc;
  enc.encode_bits(step, 16);
  enc.encode_bits(aux, 8);
  enc.encode_bits(static_cast<std::uint32_t>(bound), 16);
  if (bound == 0 || n_cells == 0) return frame_chunk(enc.finish());

  const TileIndex tiles = index_tiles(ctx);
  const auto bands = static_cast<std::size_t>(geometry.bands);
  std::vector<double> sq_sum(tiles.slots * bands, 0.0);
  std::vector<std::uint32_t> sq_count(tiles.slots * bands, 0);
  std::vector<double> mu(symbols.size());

  const auto grid_cells = static_cast<std::size_t>(geometry.cell_count());
  std::vector<std::int32_t> values(grid_cells, 0);
  std::vector<std::uint8_t> decoded(grid_cells, 0);
  for (std::size_t c = 0; c < channels; ++c) {
    std::fill(decoded.begin(), decoded.end(), 0);
    const std::size_t band = geometry.band_of_channel[c];
    for (std::size_t k = 0; k < n_cells; ++k) {
      const int cell = ctx.coded[k];
      const double m = region_causal_predict(ctx, values, decoded, cell);
      const std::int32_t s = symbols[k * channels + c];
      mu[c * n_cells + k] = m;
      const double e = s - m;
      const std::size_t slot = static_cast<std::size_t>(tiles.slot_of_cell[k]) * bands + band;
      sq_sum[slot] += e * e;
      ++sq_count[slot];
      values[static_cast<std::size_t>(cell)] = s;
      decoded[static_cast<std::size_t>(cell)] = 1;
    }
  }

  const FactorizedModel prior = FactorizedModel::scale_prior(geometry.bands);
  std::vector<double> sigma(sq_sum.size());
  for (std::size_t slot = 0; slot < tiles.slots; ++slot) {
    for (std::size_t b = 0; b < bands; ++b) {
      const std::size_t i = slot * bands + b;
      const double ms = sq_count[i] == 0 ? 0.0 : sq_sum[i] / sq_count[i];
      const int s = scale_index_for_mean_square(ms);
      prior.encode(enc, static_cast<int>(b), s);
      sigma[i] = scale_from_index(s);
    }
  }

  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t band = geometry.band_of_channel[c];
    for (std::size_t k = 0; k < n_cells; ++k) {
      const std::size_t slot = static_cast<std::size_t>(tiles.slot_of_cell[k]) * bands + band;
      GaussianBin(mu[c * n_cells + k], sigma[slot], bound).encode(enc, symbols[k * channels + c]);
    }
  }
  return frame_chunk(enc.finish());
}

RegionStreamHeader peek_region_header(std::span<const std::uint8_t> chunk) {
  RangeDecoder dec(unframe_chunk(chunk));
  RegionStreamHeader h;
  h.step = static_cast<std::uint16_t>(dec.decode_bits(16));
  h.aux = static_cast<std::uint8_t>(dec.decode_bits(8));
  h.bound = static_cast<std::int32_t>(dec.decode_bits(16));
  return h;
}

DecodedRegion decode_region(std::span<const std::uint8_t> chunk, const LatentGeometry& geometry,
                            const ContextMap& ctx) {
  check_context(geometry, ctx);
  RangeDecoder dec(unframe_chunk(chunk));
  DecodedRegion out;
  out.header.step = static_cast<std::uint16_t>(dec.decode_bits(16));
  out.header.aux = static_cast<std::uint8_t>(dec.decode_bits(8));
  out.header.bound = static_cast<std::int32_t>(dec.decode_bits(16));
  const std::int32_t bound = out.header.bound;
  if (bound > kMaxBound) fail(ErrorKind::format, "chunk declares an invalid symbol bound");

  const std::size_t n_cells = ctx.coded.size();
  const auto channels = static_cast<std::size_t>(geometry.channels);
  out.symbols.assign(n_cells * channels, 0);
  if (bound == 0 || n_cells == 0) return out;

  const TileIndex tiles = index_tiles(ctx);
  const auto bands = static_cast<std::size_t>(geometry.bands);
  const FactorizedModel prior = FactorizedModel::scale_prior(geometry.bands);
  std::vector<double> sigma(tiles.slots * bands);
  for (std::size_t slot = 0; slot < tiles.slots; ++slot) {
    for (std::size_t b = 0; b < bands; ++b) {
      sigma[slot * bands + b] = scale_from_index(prior.decode(dec, static_cast<int>(b)));
    }
  }

  const auto grid_cells = static_cast<std::size_t>(geometry.cell_count());
  std::vector<std::int32_t> values(grid_cells, 0);
  std::vector<std::uint8_t> decoded(grid_cells, 0);
  for (std::size_t c = 0; c < channels; ++c) {
    std::fill(decoded.begin(), decoded.end(), 0);
    const std::size_t band = geometry.band_of_channel[c];
    for (std::size_t k = 0; k < n_cells; ++k) {
      const int cell = ctx.coded[k];
      const double m = region_causal_predict(ctx, values, decoded, cell);
      const std::size_t slot = static_cast<std::size_t>(tiles.slot_of_cell[k]) * bands + band;
      const std::int32_t s = GaussianBin(m, sigma[slot], bound).decode(dec);
      out.symbols[k * channels + c] = s;
      values[static_cast<std::size_t>(cell)] = s;
      decoded[static_cast<std::size_t>(cell)] = 1;
    }
  }
  return out;
}

}  // namespace ssvc::entropy
