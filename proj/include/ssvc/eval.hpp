#pragma once

// Quality and rate metrics, Bjontegaard delta rate, and the RD sweep.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ssvc/codec.hpp"
#include "ssvc/frame.hpp"

namespace ssvc::eval {

inline constexpr double kPsnrCap = 99.0;

// Per-frame PSNR over all planes pooled, averaged over frames; identical
// frames score kPsnrCap.
double psnr(const Frame& a, const Frame& b);
double psnr(std::span<const Frame> a, std::span<const Frame> b);

struct MsSsim {
  double value = 1.0;
  int scales = 5;
  bool reduced = false;  // frame too small for the full pyramid
};

// Luma MS-SSIM: 11-tap Gaussian window (sigma 1.5), five scales with the
// standard exponents; fewer scales (renormalised weights) for small frames.
MsSsim ms_ssim(const Plane& a, const Plane& b);
MsSsim ms_ssim(std::span<const Frame> a, std::span<const Frame> b);

// -10 log10(1 - v).
double ms_ssim_db(double value);

double bpp(std::uint64_t stream_bytes, int width, int height, std::uint64_t frames);

struct RDPoint {
  double bpp = 0.0;
  double psnr = 0.0;
  double msssim = 0.0;
  std::string label;
};

enum class QualityAxis { psnr, msssim_db };

// Percent rate change of `test` against `anchor` at equal quality: cubic
// least-squares fits of log10(rate) over quality, integrated across the
// overlapping quality interval. Needs >= 4 points per curve.
double bd_rate(std::span<const RDPoint> anchor, std::span<const RDPoint> test,
               QualityAxis axis = QualityAxis::psnr);

struct StreamBreakdown {
  std::uint64_t header_bytes = 0;
  std::uint64_t object_bytes = 0;
  std::uint64_t background_bytes = 0;
  std::uint64_t motion_bytes = 0;
  std::uint64_t residual_bytes = 0;
  std::uint64_t total_bytes = 0;
};

struct RungResult {
  int quality = 0;
  double step = 0.0;
  double lambda = 0.0;
  RDPoint point;
  StreamBreakdown streams;
  std::vector<codec::FrameStats> frames;
  std::vector<codec::GopCost> gops;
  std::vector<partition::RegionBits> regions;  // first GoP's i-frame
  bool closed_loop = true;  // decoder output equals encoder reconstruction
};

struct SweepConfig {
  std::vector<int> qualities{0, 1, 2, 3};
  codec::EncoderConfig encoder;
  int threads = 0;
};

std::vector<RungResult> rd_sweep(std::span<const Frame> frames, const semantics::AnnotationSet* annotations,
                                 const SweepConfig& cfg);

StreamBreakdown stream_breakdown(std::span<const std::uint8_t> bytes);

// CSV tables: rd.csv, streams.csv, frames.csv, regions.csv.
void write_reports(const std::filesystem::path& dir, std::span<const RungResult> rungs);

// Reads the bpp,psnr,msssim columns of an rd.csv.
std::vector<RDPoint> read_rd_csv(const std::filesystem::path& path);

}  // namespace ssvc::eval
