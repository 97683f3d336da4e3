#include "ssvc/entropy/range_coder.hpp"

#include <zlib.h>

#include "ssvc/error.hpp"

namespace ssvc::entropy {

namespace {
constexpr std::uint32_t kTop = 1u << 24;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
         std::uint32_t{p[3]} << 24;
}
}  // namespace

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, int total_bits) {
  const std::uint32_t r = range_ >> total_bits;
  low_ += static_cast<std::uint64_t>(r) * cum;
  range_ = r * freq;
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_bits(std::uint32_t value, int nbits) {
  encode(value & ((1u << nbits) - 1), 1, nbits);
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(temp + carry));
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  std::vector<std::uint8_t> out = std::move(out_);
  *this = RangeEncoder{};
  return out;
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ < in_.size()) return in_[pos_++];
  overrun_ = true;
  return 0;
}

std::uint32_t RangeDecoder::peek(int total_bits) {
  scale_ = range_ >> total_bits;
  const std::uint32_t limit = (1u << total_bits) - 1;
  const std::uint32_t v = scale_ == 0 ? limit : code_ / scale_;
  return v > limit ? limit : v;
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq) {
  code_ -= scale_ * cum;
  range_ = scale_ * freq;
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
    // A corrupt stream can drive range to zero; keep the state well defined.
    if (range_ == 0) {
      range_ = 0xFFFFFFFFu;
      overrun_ = true;
    }
  }
}

std::uint32_t RangeDecoder::decode_bits(int nbits) {
  const std::uint32_t v = peek(nbits);
  consume(v, 1);
  return v;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> frame_chunk(std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + kChunkPrefixBytes);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, crc32(payload));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::span<const std::uint8_t> unframe_chunk(std::span<const std::uint8_t> chunk) {
  if (chunk.size() < kChunkPrefixBytes) {
    throw TruncationError(kChunkPrefixBytes, chunk.size());
  }
  const std::uint32_t length = get_u32(chunk.data());
  const std::uint32_t expected = get_u32(chunk.data() + 4);
  if (length != chunk.size() - kChunkPrefixBytes) {
    fail(ErrorKind::structural, "chunk payload length " + std::to_string(length) +
                                    " disagrees with chunk size " +
                                    std::to_string(chunk.size()));
  }
  auto payload = chunk.subspan(kChunkPrefixBytes);
  if (crc32(payload) != expected) fail(ErrorKind::checksum, "chunk checksum mismatch");
  return payload;
}

}  // namespace ssvc::entropy
