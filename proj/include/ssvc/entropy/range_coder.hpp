#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ssvc::entropy {

// Probabilities are integer frequencies out of 2^kPrecisionBits.
inline constexpr int kPrecisionBits = 16;
inline constexpr std::uint32_t kTotalFrequency = 1u << kPrecisionBits;

// 32-bit range coder (carry-propagating, byte-oriented renormalisation).
class RangeEncoder {
 public:
  // Codes the interval [cum, cum + freq) out of 2^total_bits.
  void encode(std::uint32_t cum, std::uint32_t freq, int total_bits = kPrecisionBits);

  // Uniform raw bits, nbits <= 16.
  void encode_bits(std::uint32_t value, int nbits);

  // Flushes and returns the coded bytes. The encoder is left empty.
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  // Returns the target frequency in [0, 2^total_bits) for the next symbol.
  // Must be followed by consume() with the interval that contains it.
  std::uint32_t peek(int total_bits = kPrecisionBits);
  void consume(std::uint32_t cum, std::uint32_t freq);

  std::uint32_t decode_bits(int nbits);

  // True once the decoder has asked for bytes past the end of its input.
  bool overrun() const { return overrun_; }

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t scale_ = 0;
  bool overrun_ = false;
};

// Chunk framing: u32 LE payload length, u32 LE CRC-32 of the payload, payload.
inline constexpr std::size_t kChunkPrefixBytes = 8;

std::vector<std::uint8_t> frame_chunk(std::span<const std::uint8_t> payload);

// Validates the prefix and checksum and returns a view of the payload.
// Throws Error{truncation|structural|checksum}.
std::span<const std::uint8_t> unframe_chunk(std::span<const std::uint8_t> chunk);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace ssvc::entropy
