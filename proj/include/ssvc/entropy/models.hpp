#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssvc/entropy/range_coder.hpp"
#include "ssvc/frame.hpp"

namespace ssvc::entropy {

inline constexpr double kSigmaMin = 0.05;
inline constexpr double kProbabilityMin = 1.0 / 65536.0;

// Largest admissible symbol magnitude: the alphabet [-V, V] must leave at
// least one frequency unit per symbol.
inline constexpr std::int32_t kMaxBound = 32767;

struct QuantizeResult {
  std::vector<std::int32_t> values;
  std::size_t clamped = 0;
};

// Round half away from zero of x / step, clamped to [-bound, bound].
QuantizeResult quantize(std::span<const double> x, std::int32_t bound,
                        double step = 1.0);
std::int32_t quantize_one(double x, double step = 1.0);

// Standard normal CDF from a fixed table (spacing 2^-10 on [-12, 12]) filled
// by deterministic quadrature and interpolated linearly, so the result is
// bit-identical across platforms and monotone in x.
double gaussian_cdf(double x);

// Same function in fixed point, scaled by 2^40. Monotone non-decreasing.
std::uint64_t gaussian_cdf_fixed(double x);
inline constexpr std::uint64_t kCdfOne = std::uint64_t{1} << 40;

// Probability of integer `value` under a Gaussian(mu, sigma) convolved with a
// unit uniform, restricted to [-bound, bound]: the bin mass floored at
// kProbabilityMin and renormalised over the alphabet. sigma is clamped to
// kSigmaMin.
double symbol_probability(std::int32_t value, double mu, double sigma,
                          std::int32_t bound);

// Integer coding interval of one symbol under the discretised Gaussian with
// 16-bit precision. Every symbol of the alphabet gets frequency >= 1, i.e.
// probability >= 2^-16.
class GaussianBin {
 public:
  GaussianBin(double mu, double sigma, std::int32_t bound);

  std::uint32_t cum(std::int32_t value) const;  // value in [-bound, bound + 1]
  std::uint32_t freq(std::int32_t value) const { return cum(value + 1) - cum(value); }

  void encode(RangeEncoder& enc, std::int32_t value) const;
  std::int32_t decode(RangeDecoder& dec) const;

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

 private:
  std::uint64_t boundary(std::int32_t value) const;

  double mu_;
  double sigma_;
  std::int32_t bound_;
  std::uint32_t symbols_;
  std::uint32_t spread_;  // 2^16 - symbols: mass shared in proportion to the CDF
  std::uint64_t lo_;
  std::uint64_t span_;
};

// Non-parametric fully factorised model: one static frequency table per
// channel over the alphabet [min_value, min_value + size).
class FactorizedModel {
 public:
  FactorizedModel(std::int32_t min_value, std::vector<std::vector<std::uint32_t>> freqs);

  // Tables used for the scale side information: one per band, all drawn from
  // the same fixed prior (a quarter of the mass on the smallest scale, the
  // rest spread evenly).
  static FactorizedModel scale_prior(int channels);

  std::int32_t min_value() const { return min_value_; }
  std::int32_t max_value() const {
    return min_value_ + static_cast<std::int32_t>(alphabet_) - 1;
  }
  int channels() const { return static_cast<int>(cum_.size()); }

  double probability(int channel, std::int32_t value) const;
  void encode(RangeEncoder& enc, int channel, std::int32_t value) const;
  std::int32_t decode(RangeDecoder& dec, int channel) const;

 private:
  std::int32_t min_value_;
  std::size_t alphabet_;
  std::vector<std::vector<std::uint32_t>> cum_;  // size alphabet + 1, ends at 2^16
};

// Parameters of a Gaussian-conditional stream: one (mu, sigma) per symbol.
struct GaussianParams {
  std::span<const double> mu;
  std::span<const double> sigma;
  std::int32_t bound = 0;
};

// Stand-alone model coders, producing checksummed chunks.
std::vector<std::uint8_t> range_encode(std::span<const std::int32_t> symbols,
                                       const FactorizedModel& model,
                                       std::span<const std::uint16_t> channel_of_symbol);
std::vector<std::int32_t> range_decode(std::span<const std::uint8_t> chunk,
                                       const FactorizedModel& model,
                                       std::span<const std::uint16_t> channel_of_symbol);

std::vector<std::uint8_t> range_encode(std::span<const std::int32_t> symbols,
                                       const GaussianParams& params);
std::vector<std::int32_t> range_decode(std::span<const std::uint8_t> chunk,
                                       const GaussianParams& params, std::size_t count);

// Mean predictor from the causal context on a fully available grid: the
// average of the left and upper neighbours in the same channel, 0 if neither
// exists.
double causal_predict(const LatentGrid& plane, int row, int col, int channel);

}  // namespace ssvc::entropy
