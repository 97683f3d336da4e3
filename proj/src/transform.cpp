#include "ssvc/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ssvc/detmath.hpp"
#include "ssvc/entropy/models.hpp"
#include "ssvc/error.hpp"
#include "ssvc/simd/kernels.hpp"

namespace ssvc::transform {

namespace {

std::vector<double> build_dct(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  const double dc = std::sqrt(1.0 / n);
  const double ac = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double c = detmath::cos_pi_ratio(static_cast<long>((2 * i + 1) * k), 2L * n);
      m[static_cast<std::size_t>(k) * n + i] = (k == 0 ? dc : ac) * c;
    }
  }
  return m;
}

std::vector<double> transpose(const std::vector<double>& m, int n) {
  std::vector<double> t(m.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j) * n + i] = m[static_cast<std::size_t>(i) * n + j];
  }
  return t;
}

const std::vector<double>& dct_transposed(int n) {
  static const std::vector<double> t16 = transpose(dct_matrix(16), 16);
  static const std::vector<double> t8 = transpose(dct_matrix(8), 8);
  return n == 16 ? t16 : t8;
}

struct PlaneSlot {
  int plane;
  int block;     // block edge in samples
  int channel0;  // first channel of this plane inside a cell
};

constexpr std::array<PlaneSlot, kPlaneCount> kSlots{{
    {0, kStride, 0},
    {1, kChromaBlock, kLumaChannels},
    {2, kChromaBlock, kLumaChannels + kChromaChannels},
}};

// Y = A X A^T over every block of every plane.
template <typename Sample, typename Load>
LatentPlane forward(const FrameOf<Sample>& frame, Load load) {
  if (frame.width() % kStride != 0 || frame.height() % kStride != 0) {
    fail(ErrorKind::dimension, "analysis needs dimensions padded to multiples of 16");
  }
  const int rows = frame.height() / kStride;
  const int cols = frame.width() / kStride;
  LatentPlane out(rows, cols, kChannels);
  const auto& k = simd::kernels();
  std::array<double, kStride * kStride> block{};
  std::array<double, kStride * kStride> tmp{};
  std::array<double, kStride * kStride> coeff{};
  for (const PlaneSlot& slot : kSlots) {
    const int n = slot.block;
    const auto& a = dct_matrix(n);
    const auto& at = dct_transposed(n);
    const auto& plane = frame.planes[slot.plane];
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            block[y * n + x] = load(plane.at(c * n + x, r * n + y));
          }
        }
        k.matmul(a.data(), block.data(), tmp.data(), n);
        k.matmul(tmp.data(), at.data(), coeff.data(), n);
        std::copy(coeff.begin(), coeff.begin() + n * n, out.cell(r, c) + slot.channel0);
      }
    }
  }
  return out;
}

// X = A^T Y A; `store` writes one reconstructed sample.
template <typename Store>
void inverse(const LatentPlane& latent, std::span<const std::uint8_t> valid, Store store) {
  if (latent.channels != kChannels) {
    fail(ErrorKind::dimension, "latent plane must carry 384 channels");
  }
  if (!valid.empty() && valid.size() != static_cast<std::size_t>(latent.cell_count())) {
    fail(ErrorKind::dimension, "validity map does not match the latent grid");
  }
  const auto& k = simd::kernels();
  std::array<double, kStride * kStride> tmp{};
  std::array<double, kStride * kStride> pixels{};
  for (const PlaneSlot& slot : kSlots) {
    const int n = slot.block;
    const auto& a = dct_matrix(n);
    const auto& at = dct_transposed(n);
    for (int r = 0; r < latent.rows; ++r) {
      for (int c = 0; c < latent.cols; ++c) {
        const bool ok = valid.empty() || valid[static_cast<std::size_t>(r * latent.cols + c)] != 0;
        if (ok) {
          k.matmul(at.data(), latent.cell(r, c) + slot.channel0, tmp.data(), n);
          k.matmul(tmp.data(), a.data(), pixels.data(), n);
        }
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            store(slot.plane, c * n + x, r * n + y, ok, pixels[y * n + x]);
          }
        }
      }
    }
  }
}

}  // namespace

double quantizer_step(int quality) {
  if (quality < 0 || quality >= kQualityLevels) {
    fail(ErrorKind::argument, "quality index must be in 0..3");
  }
  return static_cast<double>(4 << quality);
}

TransformSpec TransformSpec::for_quality(int quality) {
  TransformSpec spec;
  spec.step = quantizer_step(quality);
  return spec;
}

entropy::LatentGeometry latent_geometry(int rows, int cols) {
  entropy::LatentGeometry g;
  g.rows = rows;
  g.cols = cols;
  g.channels = kChannels;
  g.bands = (2 * kStride - 1) + 2 * (2 * kChromaBlock - 1);
  g.band_of_channel.resize(kChannels);
  for (int v = 0; v < kStride; ++v) {
    for (int u = 0; u < kStride; ++u) g.band_of_channel[v * kStride + u] = static_cast<std::uint16_t>(u + v);
  }
  const int luma_bands = 2 * kStride - 1;
  const int chroma_bands = 2 * kChromaBlock - 1;
  for (int p = 0; p < 2; ++p) {
    for (int v = 0; v < kChromaBlock; ++v) {
      for (int u = 0; u < kChromaBlock; ++u) {
        g.band_of_channel[kLumaChannels + p * kChromaChannels + v * kChromaBlock + u] =
            static_cast<std::uint16_t>(luma_bands + p * chroma_bands + u + v);
      }
    }
  }
  return g;
}

const std::vector<double>& dct_matrix(int n) {
  static const std::vector<double> m16 = build_dct(16);
  static const std::vector<double> m8 = build_dct(8);
  if (n == 16) return m16;
  if (n == 8) return m8;
  fail(ErrorKind::argument, "DCT size must be 8 or 16");
}

LatentPlane analysis(const Frame& frame) {
  return forward(frame, [](std::uint8_t v) { return static_cast<double>(v) - 128.0; });
}

LatentPlane analysis_residual(const FrameF& residual) {
  return forward(residual, [](double v) { return v; });
}

Frame synthesis(const LatentPlane& latent, std::span<const std::uint8_t> valid) {
  Frame out(latent.cols * kStride, latent.rows * kStride);
  inverse(latent, valid, [&](int plane, int x, int y, bool ok, double v) {
    std::uint8_t px = 128;
    if (ok) px = static_cast<std::uint8_t>(std::clamp(std::round(v + 128.0), 0.0, 255.0));
    out.planes[plane].at(x, y) = px;
  });
  return out;
}

FrameF synthesis_residual(const LatentPlane& latent) {
  FrameF out(latent.cols * kStride, latent.rows * kStride);
  inverse(latent, {}, [&](int plane, int x, int y, bool, double v) { out.planes[plane].at(x, y) = v; });
  return out;
}

LatentGrid quantize_latent(const LatentPlane& latent, double step, std::size_t* clamped) {
  LatentGrid grid(latent.rows, latent.cols, latent.channels);
  const auto q = entropy::quantize(latent.values, entropy::kMaxBound, step);
  grid.values = q.values;
  if (clamped != nullptr) *clamped = q.clamped;
  return grid;
}

LatentPlane dequantize_latent(const LatentGrid& grid, double step) {
  LatentPlane out(grid.rows, grid.cols, grid.channels);
  for (std::size_t i = 0; i < grid.values.size(); ++i) out.values[i] = grid.values[i] * step;
  return out;
}

Mask cell_mask_to_pixels(std::span<const std::uint8_t> valid, int rows, int cols) {
  Mask mask(cols * kStride, rows * kStride, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (valid[static_cast<std::size_t>(r * cols + c)] == 0) continue;
      for (int y = 0; y < kStride; ++y) {
        std::fill_n(mask.row(r * kStride + y) + c * kStride, kStride, std::uint8_t{1});
      }
    }
  }
  return mask;
}

}  // namespace ssvc::transform
