#include "ssvc/container.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ssvc/entropy/range_coder.hpp"
#include "ssvc/error.hpp"
#include "ssvc/frame.hpp"
#include "ssvc/partition.hpp"

namespace ssvc::container {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t>& out() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  // Ensures `n` more bytes exist; `total_hint` is the smallest header size
  // known so far, reported when the prefix is short.
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw TruncationError(pos_ + n, in_.size());
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(in_[pos_] | in_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

[[noreturn]] void structural(const std::string& what) { fail(ErrorKind::structural, what); }

void validate_global(const GlobalHeader& h) {
  if (h.version != kVersion) fail(ErrorKind::format, "unsupported version " + std::to_string(h.version));
  if (h.stride != 16) fail(ErrorKind::format, "unregistered latent stride " + std::to_string(h.stride));
  if (h.channels != 384) fail(ErrorKind::format, "unregistered channel count " + std::to_string(h.channels));
  if (h.transform_id != kTransformBlockDct) fail(ErrorKind::format, "unregistered transform id");
  if (h.entropy_model_id != kEntropyGaussianCausal) fail(ErrorKind::format, "unregistered entropy model id");
  if (h.quality_index > 3) fail(ErrorKind::format, "quality index out of range");
  if (h.width == 0 || h.height == 0) structural("frame dimensions must be positive");
  if (h.frame_count == 0) structural("frame count must be positive");
  if (h.gop_size == 0) structural("GoP size must be positive");
}

void validate_objects(const GlobalHeader& h, const std::vector<ObjectRecord>& objects) {
  for (const ObjectRecord& o : objects) {
    if (!(o.bbox.a1 < o.bbox.a2) || !(o.bbox.b1 < o.bbox.b2) || o.bbox.a2 > h.width ||
        o.bbox.b2 > h.height) {
      structural("object box is empty or outside the frame");
    }
  }
  const auto layout = partition::build_layout(objects, h.stride, h.grid_rows(), h.grid_cols());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].region != layout.region_of_object[i]) {
      structural("object " + std::to_string(i) + " maps to the wrong region");
    }
  }
}

std::size_t region_count_of(const std::vector<ObjectRecord>& objects) {
  std::size_t n = 0;
  for (const ObjectRecord& o : objects) n = std::max<std::size_t>(n, o.region + std::size_t{1});
  return n;
}

void check_sequence(const GlobalHeader& h, std::uint32_t gop, const SemanticHeader& sem) {
  const auto expected = expected_chunk_order(h, gop, sem.region_count());
  if (expected.size() != sem.chunks.size()) {
    structural("GoP " + std::to_string(gop) + " has " + std::to_string(sem.chunks.size()) +
               " chunks, expected " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const ChunkEntry& e = sem.chunks[i];
    if (e.kind != expected[i].kind || e.index != expected[i].index || e.frame != expected[i].frame) {
      structural("GoP " + std::to_string(gop) + " chunk " + std::to_string(i) + " is out of order");
    }
    if (e.length < entropy::kChunkPrefixBytes) structural("chunk shorter than its prefix");
  }
}

}  // namespace

std::uint32_t GlobalHeader::gop_count() const {
  return gop_size == 0 ? 0
                       : static_cast<std::uint32_t>((std::uint64_t{frame_count} + gop_size - 1) / gop_size);
}

std::uint32_t GlobalHeader::gop_frame_count(std::uint32_t gop) const {
  const std::uint32_t first = gop_first_frame(gop);
  return std::min<std::uint32_t>(gop_size, frame_count - first);
}

int GlobalHeader::grid_rows() const { return padded_size(height, stride) / stride; }
int GlobalHeader::grid_cols() const { return padded_size(width, stride) / stride; }

const char* to_string(ChunkKind kind) {
  switch (kind) {
    case ChunkKind::object: return "object";
    case ChunkKind::background: return "background";
    case ChunkKind::motion: return "motion";
    case ChunkKind::residual: return "residual";
  }
  return "?";
}

std::size_t SemanticHeader::region_count() const { return region_count_of(objects); }

std::uint64_t ParsedHeader::payload_bytes() const {
  std::uint64_t n = 0;
  for (const auto& g : gops) {
    for (const auto& c : g.chunks) n += c.length;
  }
  return n;
}

std::vector<ChunkEntry> expected_chunk_order(const GlobalHeader& header, std::uint32_t gop,
                                             std::size_t object_regions) {
  std::vector<ChunkEntry> out;
  const std::uint32_t first = header.gop_first_frame(gop);
  for (std::size_t k = 0; k < object_regions; ++k) {
    out.push_back(ChunkEntry{ChunkKind::object, static_cast<std::uint16_t>(k), first, 0, 0});
  }
  out.push_back(ChunkEntry{ChunkKind::background, 0, first, 0, 0});
  const std::uint32_t frames = header.gop_frame_count(gop);
  for (std::uint32_t f = 1; f < frames; ++f) {
    out.push_back(ChunkEntry{ChunkKind::motion, 0, first + f, 0, 0});
    out.push_back(ChunkEntry{ChunkKind::residual, 0, first + f, 0, 0});
  }
  return out;
}

std::size_t header_size(std::span<const SemanticHeader> gops) {
  std::size_t n = kGlobalHeaderBytes;
  for (const auto& g : gops) {
    n += 2 + g.objects.size() * kObjectRecordBytes + 2 + g.chunks.size() * kChunkEntryBytes;
  }
  return n;
}

std::vector<std::uint8_t> serialize_stream(const GlobalHeader& header,
                                           std::span<const GopPayload> gops) {
  validate_global(header);
  if (gops.size() != header.gop_count()) {
    structural("stream has " + std::to_string(gops.size()) + " GoPs, header implies " +
               std::to_string(header.gop_count()));
  }

  std::vector<SemanticHeader> sems(gops.size());
  for (std::size_t g = 0; g < gops.size(); ++g) {
    if (gops[g].objects.size() > 65535) fail(ErrorKind::capacity, "more than 65535 objects in a GoP");
    if (gops[g].chunks.size() > 65535) fail(ErrorKind::capacity, "more than 65535 chunks in a GoP");
    validate_objects(header, gops[g].objects);
    sems[g].objects = gops[g].objects;
    for (const PayloadChunk& c : gops[g].chunks) {
      if (c.bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
        fail(ErrorKind::capacity, "chunk larger than 4 GiB");
      }
      sems[g].chunks.push_back(ChunkEntry{c.kind, c.index, c.frame, 0,
                                          static_cast<std::uint32_t>(c.bytes.size())});
    }
    check_sequence(header, static_cast<std::uint32_t>(g), sems[g]);
  }

  std::uint64_t offset = header_size(sems);
  for (auto& sem : sems) {
    for (auto& e : sem.chunks) {
      if (offset > std::numeric_limits<std::uint32_t>::max()) {
        fail(ErrorKind::capacity, "stream exceeds 32-bit chunk offsets");
      }
      e.offset = static_cast<std::uint32_t>(offset);
      offset += e.length;
    }
  }

  Writer w;
  w.out().reserve(static_cast<std::size_t>(offset));
  w.bytes(kMagic);
  w.u8(header.version);
  w.u16(header.width);
  w.u16(header.height);
  w.u32(header.frame_count);
  w.u8(header.gop_size);
  w.u8(header.stride);
  w.u16(header.channels);
  w.u8(header.transform_id);
  w.u8(header.entropy_model_id);
  w.u8(header.quality_index);
  for (const auto& sem : sems) {
    w.u16(static_cast<std::uint16_t>(sem.objects.size()));
    for (const ObjectRecord& o : sem.objects) {
      w.u16(o.class_id);
      w.u16(o.bbox.a1);
      w.u16(o.bbox.b1);
      w.u16(o.bbox.a2);
      w.u16(o.bbox.b2);
      w.u16(o.region);
    }
    w.u16(static_cast<std::uint16_t>(sem.chunks.size()));
    for (const ChunkEntry& e : sem.chunks) {
      w.u8(static_cast<std::uint8_t>(e.kind));
      w.u16(e.index);
      w.u32(e.frame);
      w.u32(e.offset);
      w.u32(e.length);
    }
  }
  for (const auto& g : gops) {
    for (const PayloadChunk& c : g.chunks) w.bytes(c.bytes);
  }
  return std::move(w.out());
}

ParsedHeader parse_header_only(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(kGlobalHeaderBytes);
  for (std::uint8_t m : kMagic) {
    if (r.u8() != m) fail(ErrorKind::format, "bad magic: not an .ssb stream");
  }
  ParsedHeader out;
  GlobalHeader& h = out.global;
  h.version = r.u8();
  h.width = r.u16();
  h.height = r.u16();
  h.frame_count = r.u32();
  h.gop_size = r.u8();
  h.stride = r.u8();
  h.channels = r.u16();
  h.transform_id = r.u8();
  h.entropy_model_id = r.u8();
  h.quality_index = r.u8();
  validate_global(h);

  const std::uint32_t gop_count = h.gop_count();
  // Every GoP header takes at least 4 bytes; refuse counts the input cannot hold.
  if (static_cast<std::uint64_t>(gop_count) * 4 > bytes.size()) {
    throw TruncationError(kGlobalHeaderBytes + static_cast<std::size_t>(gop_count) * 4, bytes.size());
  }
  out.gops.resize(gop_count);
  for (std::uint32_t g = 0; g < gop_count; ++g) {
    SemanticHeader& sem = out.gops[g];
    const std::uint16_t n_objects = r.u16();
    r.need(static_cast<std::size_t>(n_objects) * kObjectRecordBytes);
    sem.objects.resize(n_objects);
    for (ObjectRecord& o : sem.objects) {
      o.class_id = r.u16();
      o.bbox.a1 = r.u16();
      o.bbox.b1 = r.u16();
      o.bbox.a2 = r.u16();
      o.bbox.b2 = r.u16();
      o.region = r.u16();
    }
    const std::uint16_t n_chunks = r.u16();
    r.need(static_cast<std::size_t>(n_chunks) * kChunkEntryBytes);
    sem.chunks.resize(n_chunks);
    for (ChunkEntry& e : sem.chunks) {
      const std::uint8_t kind = r.u8();
      if (kind > 3) structural("unknown chunk kind " + std::to_string(kind));
      e.kind = static_cast<ChunkKind>(kind);
      e.index = r.u16();
      e.frame = r.u32();
      e.offset = r.u32();
      e.length = r.u32();
    }
  }
  out.header_bytes = r.pos();

  std::uint64_t expected_offset = out.header_bytes;
  for (std::uint32_t g = 0; g < gop_count; ++g) {
    validate_objects(h, out.gops[g].objects);
    check_sequence(h, g, out.gops[g]);
    for (const ChunkEntry& e : out.gops[g].chunks) {
      if (e.offset != expected_offset) {
        structural("chunk offset " + std::to_string(e.offset) + " expected " +
                   std::to_string(expected_offset));
      }
      expected_offset += e.length;
    }
  }
  return out;
}

std::span<const std::uint8_t> StreamView::chunk(const ChunkEntry& entry) const {
  return bytes.subspan(entry.offset, entry.length);
}

StreamView parse_stream(std::span<const std::uint8_t> bytes) {
  StreamView view;
  view.header = parse_header_only(bytes);
  const std::uint64_t total = view.header.header_bytes + view.header.payload_bytes();
  if (total > bytes.size()) throw TruncationError(static_cast<std::size_t>(total), bytes.size());
  if (total < bytes.size()) {
    structural("stream has " + std::to_string(bytes.size() - total) + " trailing bytes");
  }
  view.bytes = bytes;
  return view;
}

std::vector<GopPayload> payloads(const StreamView& stream) {
  std::vector<GopPayload> out;
  for (const SemanticHeader& sem : stream.header.gops) {
    GopPayload g;
    g.objects = sem.objects;
    for (const ChunkEntry& e : sem.chunks) {
      const auto b = stream.chunk(e);
      g.chunks.push_back(PayloadChunk{e.kind, e.index, e.frame, {b.begin(), b.end()}});
    }
    out.push_back(std::move(g));
  }
  return out;
}

const ChunkEntry& find_chunk(const ParsedHeader& header, ChunkKind kind, std::uint32_t frame,
                             std::uint16_t index) {
  const std::uint32_t gop = header.global.gop_size == 0 ? 0 : frame / header.global.gop_size;
  if (gop < header.gops.size()) {
    for (const ChunkEntry& e : header.gops[gop].chunks) {
      if (e.kind == kind && e.frame == frame && e.index == index) return e;
    }
  }
  fail(ErrorKind::not_found, std::string("no ") + to_string(kind) + " chunk for frame " +
                                 std::to_string(frame));
}

ByteRange locate_chunk(const ParsedHeader& header, ChunkKind kind, std::uint32_t frame,
                       std::optional<std::uint16_t> object) {
  std::uint16_t index = 0;
  if (kind == ChunkKind::object) {
    if (!object) fail(ErrorKind::argument, "object chunks are addressed by object index");
    const std::uint32_t gop = header.global.gop_size == 0 ? 0 : frame / header.global.gop_size;
    if (gop >= header.gops.size() || *object >= header.gops[gop].objects.size()) {
      fail(ErrorKind::not_found, "object " + std::to_string(*object) + " not present for frame " +
                                     std::to_string(frame));
    }
    index = header.gops[gop].objects[*object].region;
  }
  const ChunkEntry& e = find_chunk(header, kind, frame, index);
  return ByteRange{e.offset, e.length};
}

}  // namespace ssvc::container
