#pragma once

// The .ssb container: a global header, one semantic header per GoP (objects
// and chunk table), then the payload chunks in table order. All integers are
// little-endian and fixed width. See docs/ssb_format.md for the byte layout.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssvc/objects.hpp"

namespace ssvc::container {

inline constexpr std::array<std::uint8_t, 4> kMagic{'S', 'S', 'B', '1'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kGlobalHeaderBytes = 20;
inline constexpr std::size_t kObjectRecordBytes = 12;
inline constexpr std::size_t kChunkEntryBytes = 15;
inline constexpr std::uint8_t kTransformBlockDct = 1;
inline constexpr std::uint8_t kEntropyGaussianCausal = 1;

struct GlobalHeader {
  std::uint8_t version = kVersion;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint32_t frame_count = 0;
  std::uint8_t gop_size = 0;
  std::uint8_t stride = 16;
  std::uint16_t channels = 384;
  std::uint8_t transform_id = kTransformBlockDct;
  std::uint8_t entropy_model_id = kEntropyGaussianCausal;
  std::uint8_t quality_index = 0;

  std::uint32_t gop_count() const;
  std::uint32_t gop_first_frame(std::uint32_t gop) const { return gop * gop_size; }
  std::uint32_t gop_frame_count(std::uint32_t gop) const;
  std::uint32_t gop_of_frame(std::uint32_t frame) const { return frame / gop_size; }
  int grid_rows() const;
  int grid_cols() const;

  bool operator==(const GlobalHeader&) const = default;
};

enum class ChunkKind : std::uint8_t { object = 0, background = 1, motion = 2, residual = 3 };

const char* to_string(ChunkKind kind);

struct ChunkEntry {
  ChunkKind kind = ChunkKind::background;
  std::uint16_t index = 0;  // region index for object chunks, else 0
  std::uint32_t frame = 0;  // absolute frame index
  std::uint32_t offset = 0;  // absolute file offset
  std::uint32_t length = 0;  // bytes, including the 8-byte chunk prefix

  bool operator==(const ChunkEntry&) const = default;
};

struct SemanticHeader {
  std::vector<ObjectRecord> objects;
  std::vector<ChunkEntry> chunks;

  std::size_t region_count() const;  // object regions, excluding background
  bool operator==(const SemanticHeader&) const = default;
};

struct ParsedHeader {
  GlobalHeader global;
  std::vector<SemanticHeader> gops;
  std::size_t header_bytes = 0;  // bytes consumed by all headers

  std::uint64_t payload_bytes() const;
  bool operator==(const ParsedHeader&) const = default;
};

struct PayloadChunk {
  ChunkKind kind = ChunkKind::background;
  std::uint16_t index = 0;
  std::uint32_t frame = 0;
  std::vector<std::uint8_t> bytes;  // framed chunk as stored

  bool operator==(const PayloadChunk&) const = default;
};

struct GopPayload {
  std::vector<ObjectRecord> objects;
  std::vector<PayloadChunk> chunks;

  bool operator==(const GopPayload&) const = default;
};

struct ByteRange {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const ByteRange&) const = default;
};

// Order of chunks within a GoP: object regions 0..K-1 and the background for
// the i-frame, then (motion, residual) per p-frame.
std::vector<ChunkEntry> expected_chunk_order(const GlobalHeader& header, std::uint32_t gop,
                                             std::size_t object_regions);

std::size_t header_size(std::span<const SemanticHeader> gops);

// Throws Error{structural} for inconsistent tables or headers and
// Error{capacity} when a value overflows its field.
std::vector<std::uint8_t> serialize_stream(const GlobalHeader& header,
                                           std::span<const GopPayload> gops);

// Reads only the header region. Throws Error{format} on bad magic, version or
// unregistered ids, TruncationError (with the needed length) on a short
// prefix, Error{structural} on inconsistent tables.
ParsedHeader parse_header_only(std::span<const std::uint8_t> bytes);

// Full structural parse: headers plus the check that header length and chunk
// lengths add up to the file length.
struct StreamView {
  ParsedHeader header;
  std::span<const std::uint8_t> bytes;

  std::span<const std::uint8_t> chunk(const ChunkEntry& entry) const;
};

StreamView parse_stream(std::span<const std::uint8_t> bytes);
std::vector<GopPayload> payloads(const StreamView& stream);

// Byte range of a chunk. For ChunkKind::object, `object` is the object's
// index in its GoP's record list and `frame` the GoP's i-frame. Throws
// Error{not_found}.
ByteRange locate_chunk(const ParsedHeader& header, ChunkKind kind, std::uint32_t frame,
                       std::optional<std::uint16_t> object = std::nullopt);

const ChunkEntry& find_chunk(const ParsedHeader& header, ChunkKind kind, std::uint32_t frame,
                             std::uint16_t index = 0);

}  // namespace ssvc::container
