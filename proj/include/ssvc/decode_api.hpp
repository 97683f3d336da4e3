#pragma once

// Partial decoding: every request touches only the chunks it needs, and
// reports exactly which bytes it read.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssvc/container.hpp"
#include "ssvc/frame.hpp"
#include "ssvc/intercode.hpp"

namespace ssvc::decode {

enum class Mode { header, objects, background, motion, residual, object_tube, full };

const char* to_string(Mode mode);

struct DecodeRequest {
  Mode mode = Mode::full;
  // objects / object_tube: indices into the GoP's object list.
  std::vector<std::uint16_t> objects;
  // objects: select every object of these classes instead.
  std::vector<std::uint16_t> classes;
  // GoP selector for objects, background and object_tube; all GoPs when
  // unset (object_tube defaults to GoP 0).
  std::optional<std::uint32_t> gop;
  // Frame range [first, last] for motion, residual and full.
  std::uint32_t first_frame = 0;
  std::uint32_t last_frame = 0xFFFFFFFFu;
};

struct ChunkRead {
  container::ChunkEntry entry;
  std::uint32_t gop = 0;
};

struct BitReport {
  std::size_t header_bytes = 0;
  std::size_t file_bytes = 0;
  std::size_t object_bytes = 0;
  std::size_t background_bytes = 0;
  std::size_t motion_bytes = 0;
  std::size_t residual_bytes = 0;
  std::vector<ChunkRead> chunks;  // in read order

  std::size_t bytes_read() const {
    return header_bytes + object_bytes + background_bytes + motion_bytes + residual_bytes;
  }
  double fraction() const {
    return file_bytes == 0 ? 0.0 : static_cast<double>(bytes_read()) / static_cast<double>(file_bytes);
  }
};

struct SelectedObject {
  std::uint32_t gop = 0;
  std::uint16_t index = 0;
  ObjectRecord record;
};

// A decoded picture at frame size. Pixels outside `valid` are mid-gray.
struct PartialFrame {
  std::uint32_t frame = 0;
  Frame image;
  Mask valid;
};

struct MotionFrame {
  std::uint32_t frame = 0;
  intercode::MotionField field;
};

struct ResidualFrame {
  std::uint32_t frame = 0;
  FrameF residual;  // at the padded coding size
};

struct DecodeResult {
  container::ParsedHeader header;
  std::vector<SelectedObject> objects;
  std::vector<PartialFrame> frames;
  std::vector<MotionFrame> motion;
  std::vector<ResidualFrame> residuals;
  BitReport bits;
};

struct DecodeLimits {
  // Upper bound on decoded luma samples (width * height * frames decoded).
  std::uint64_t max_pixels = std::uint64_t{1} << 30;
};

// Throws Error{not_found} for absent objects, GoPs or frames.
DecodeResult decode(std::span<const std::uint8_t> bytes, const DecodeRequest& request,
                    const DecodeLimits& limits = {});

// Share of the file a request reads: bytes_read / file size.
double savings_report(std::span<const std::uint8_t> bytes, const DecodeRequest& request);

}  // namespace ssvc::decode
