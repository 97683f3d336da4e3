#include "ssvc/entropy/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ssvc/detmath.hpp"
#include "ssvc/error.hpp"

namespace ssvc::entropy {

namespace {

constexpr int kCdfStepsPerUnit = 1024;
constexpr double kCdfRange = 12.0;
constexpr int kCdfIntervals = static_cast<int>(2 * kCdfRange) * kCdfStepsPerUnit;

double normal_pdf(double x) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return kInvSqrt2Pi * detmath::exp(-0.5 * x * x);
}

// Composite Simpson integration of the density, one panel per table step.
std::vector<std::uint64_t> build_cdf_table() {
  const double h = 1.0 / kCdfStepsPerUnit;
  std::vector<double> cdf(kCdfIntervals + 1, 0.0);
  for (int i = 0; i < kCdfIntervals; ++i) {
    const double x0 = -kCdfRange + i * h;
    const double panel =
        h / 6.0 * (normal_pdf(x0) + 4.0 * normal_pdf(x0 + 0.5 * h) + normal_pdf(x0 + h));
    cdf[i + 1] = cdf[i] + panel;
  }
  const double total = cdf.back();
  std::vector<std::uint64_t> table(kCdfIntervals + 1);
  const double scale = static_cast<double>(kCdfOne);
  for (int i = 0; i <= kCdfIntervals; ++i) {
    const double v = std::floor(cdf[i] / total * scale + 0.5);
    table[i] = static_cast<std::uint64_t>(v);
    if (i > 0) table[i] = std::max(table[i], table[i - 1]);
  }
  table.front() = 0;
  table.back() = kCdfOne;
  return table;
}

const std::vector<std::uint64_t>& cdf_table() {
  static const std::vector<std::uint64_t> table = build_cdf_table();
  return table;
}

}  // namespace

std::int32_t quantize_one(double x, double step) {
  return static_cast<std::int32_t>(std::round(x / step));
}

QuantizeResult quantize(std::span<const double> x, std::int32_t bound, double step) {
  QuantizeResult out;
  out.values.resize(x.size());
  const double limit = static_cast<double>(bound);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double q = std::round(x[i] / step);
    if (q > limit) {
      q = limit;
      ++out.clamped;
    } else if (q < -limit) {
      q = -limit;
      ++out.clamped;
    }
    out.values[i] = static_cast<std::int32_t>(q);
  }
  return out;
}

std::uint64_t gaussian_cdf_fixed(double x) {
  if (!(x > -kCdfRange)) return 0;  // also maps NaN to 0
  if (x >= kCdfRange) return kCdfOne;
  const auto& table = cdf_table();
  const double t = (x + kCdfRange) * kCdfStepsPerUnit;
  const auto i = static_cast<std::size_t>(t);
  if (i >= static_cast<std::size_t>(kCdfIntervals)) return kCdfOne;
  const auto frac = static_cast<std::uint64_t>((t - static_cast<double>(i)) * 65536.0);
  return table[i] + (((table[i + 1] - table[i]) * frac) >> 16);
}

double gaussian_cdf(double x) {
  return static_cast<double>(gaussian_cdf_fixed(x)) / static_cast<double>(kCdfOne);
}

double symbol_probability(std::int32_t value, double mu, double sigma, std::int32_t bound) {
  if (value < -bound || value > bound) return 0.0;
  sigma = std::max(sigma, kSigmaMin);
  auto mass = [&](std::int32_t v) {
    const double p = gaussian_cdf((v + 0.5 - mu) / sigma) - gaussian_cdf((v - 0.5 - mu) / sigma);
    return std::max(p, kProbabilityMin);
  };
  double total = 0.0;
  for (std::int32_t v = -bound; v <= bound; ++v) total += mass(v);
  return mass(value) / total;
}

GaussianBin::GaussianBin(double mu, double sigma, std::int32_t bound)
    : mu_(mu), sigma_(std::max(sigma, kSigmaMin)), bound_(bound) {
  if (bound < 0 || bound > kMaxBound) {
    fail(ErrorKind::argument, "symbol bound out of range: " + std::to_string(bound));
  }
  symbols_ = static_cast<std::uint32_t>(2 * bound + 1);
  spread_ = kTotalFrequency - symbols_;
  lo_ = boundary(-bound);
  span_ = boundary(bound + 1) - lo_;
}

std::uint64_t GaussianBin::boundary(std::int32_t value) const {
  return gaussian_cdf_fixed((static_cast<double>(value) - 0.5 - mu_) / sigma_);
}

std::uint32_t GaussianBin::cum(std::int32_t value) const {
  const auto k = static_cast<std::uint64_t>(value + bound_);
  std::uint64_t shared;
  if (span_ == 0) {
    // The Gaussian puts no resolvable mass on the alphabet: share uniformly.
    shared = spread_ * k / symbols_;
  } else {
    shared = spread_ * (boundary(value) - lo_) / span_;
  }
  return static_cast<std::uint32_t>(k + shared);
}

void GaussianBin::encode(RangeEncoder& enc, std::int32_t value) const {
  const std::uint32_t lo = cum(value);
  enc.encode(lo, cum(value + 1) - lo);
}

std::int32_t GaussianBin::decode(RangeDecoder& dec) const {
  const std::uint32_t target = dec.peek();
  double guess = std::round(mu_);
  guess = std::clamp(guess, static_cast<double>(-bound_), static_cast<double>(bound_));
  std::int32_t lo = static_cast<std::int32_t>(guess);
  std::int32_t hi;
  // Bracket cum(lo) <= target < cum(hi) by galloping away from the mean.
  if (cum(lo) <= target) {
    std::int32_t step = 1;
    hi = lo + 1;
    while (hi <= bound_ && cum(hi) <= target) {
      lo = hi;
      hi = std::min(hi + step, bound_ + 1);
      step *= 2;
    }
  } else {
    hi = lo;
    std::int32_t step = 1;
    lo = hi - 1;
    while (lo > -bound_ && cum(lo) > target) {
      hi = lo;
      lo = std::max(lo - step, -bound_);
      step *= 2;
    }
  }
  while (hi - lo > 1) {
    const std::int32_t mid = lo + (hi - lo) / 2;
    if (cum(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const std::uint32_t c = cum(lo);
  dec.consume(c, cum(lo + 1) - c);
  return lo;
}

FactorizedModel::FactorizedModel(std::int32_t min_value,
                                 std::vector<std::vector<std::uint32_t>> freqs)
    : min_value_(min_value) {
  if (freqs.empty() || freqs.front().empty()) {
    fail(ErrorKind::argument, "factorized model needs at least one non-empty table");
  }
  alphabet_ = freqs.front().size();
  for (const auto& table : freqs) {
    if (table.size() != alphabet_) {
      fail(ErrorKind::argument, "factorized tables must share one alphabet");
    }
    std::vector<std::uint32_t> cum(alphabet_ + 1, 0);
    for (std::size_t i = 0; i < alphabet_; ++i) {
      if (table[i] == 0) fail(ErrorKind::argument, "zero frequency in factorized table");
      cum[i + 1] = cum[i] + table[i];
    }
    if (cum.back() != kTotalFrequency) {
      fail(ErrorKind::argument, "factorized table does not sum to 2^16");
    }
    cum_.push_back(std::move(cum));
  }
}

FactorizedModel FactorizedModel::scale_prior(int channels) {
  constexpr std::size_t kAlphabet = 32;
  constexpr std::uint32_t kHead = kTotalFrequency / 4;
  std::vector<std::uint32_t> freq(kAlphabet);
  freq[0] = kHead;
  const std::uint32_t rest = kTotalFrequency - kHead;
  const std::uint32_t each = rest / (kAlphabet - 1);
  std::uint32_t extra = rest - each * (kAlphabet - 1);
  for (std::size_t i = 1; i < kAlphabet; ++i) {
    freq[i] = each + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
  }
  return FactorizedModel(-8, std::vector<std::vector<std::uint32_t>>(
                                 static_cast<std::size_t>(std::max(channels, 1)), freq));
}

double FactorizedModel::probability(int channel, std::int32_t value) const {
  const auto& cum = cum_.at(static_cast<std::size_t>(channel));
  const auto k = static_cast<std::size_t>(value - min_value_);
  return static_cast<double>(cum[k + 1] - cum[k]) / kTotalFrequency;
}

void FactorizedModel::encode(RangeEncoder& enc, int channel, std::int32_t value) const {
  if (value < min_value_ || value > max_value()) {
    fail(ErrorKind::argument, "symbol outside factorized alphabet");
  }
  const auto& cum = cum_[static_cast<std::size_t>(channel)];
  const auto k = static_cast<std::size_t>(value - min_value_);
  enc.encode(cum[k], cum[k + 1] - cum[k]);
}

std::int32_t FactorizedModel::decode(RangeDecoder& dec, int channel) const {
  const auto& cum = cum_[static_cast<std::size_t>(channel)];
  const std::uint32_t target = dec.peek();
  const auto it = std::upper_bound(cum.begin(), cum.end(), target);
  const auto k = static_cast<std::size_t>(it - cum.begin()) - 1;
  dec.consume(cum[k], cum[k + 1] - cum[k]);
  return min_value_ + static_cast<std::int32_t>(k);
}

std::vector<std::uint8_t> range_encode(std::span<const std::int32_t> symbols,
                                       const FactorizedModel& model,
                                       std::span<const std::uint16_t> channel_of_symbol) {
  if (symbols.size() != channel_of_symbol.size()) {
    fail(ErrorKind::argument, "one channel index per symbol required");
  }
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    model.encode(enc, channel_of_symbol[i], symbols[i]);
  }
  return frame_chunk(enc.finish());
}

std::vector<std::int32_t> range_decode(std::span<const std::uint8_t> chunk,
                                       const FactorizedModel& model,
                                       std::span<const std::uint16_t> channel_of_symbol) {
  RangeDecoder dec(unframe_chunk(chunk));
  std::vector<std::int32_t> out(channel_of_symbol.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = model.decode(dec, channel_of_symbol[i]);
  return out;
}

std::vector<std::uint8_t> range_encode(std::span<const std::int32_t> symbols,
                                       const GaussianParams& params) {
  if (params.mu.size() < symbols.size() || params.sigma.size() < symbols.size()) {
    fail(ErrorKind::argument, "one (mu, sigma) pair per symbol required");
  }
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] < -params.bound || symbols[i] > params.bound) {
      fail(ErrorKind::argument, "symbol outside [-bound, bound]");
    }
    GaussianBin(params.mu[i], params.sigma[i], params.bound).encode(enc, symbols[i]);
  }
  return frame_chunk(enc.finish());
}

std::vector<std::int32_t> range_decode(std::span<const std::uint8_t> chunk,
                                       const GaussianParams& params, std::size_t count) {
  if (params.mu.size() < count || params.sigma.size() < count) {
    fail(ErrorKind::argument, "one (mu, sigma) pair per symbol required");
  }
  RangeDecoder dec(unframe_chunk(chunk));
  std::vector<std::int32_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = GaussianBin(params.mu[i], params.sigma[i], params.bound).decode(dec);
  }
  return out;
}

double causal_predict(const LatentGrid& plane, int row, int col, int channel) {
  int count = 0;
  double sum = 0.0;
  if (col > 0) {
    sum += plane.cell(row, col - 1)[channel];
    ++count;
  }
  if (row > 0) {
    sum += plane.cell(row - 1, col)[channel];
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

}  // namespace ssvc::entropy
