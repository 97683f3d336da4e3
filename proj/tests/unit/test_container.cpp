#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "ssvc/container.hpp"
#include "ssvc/error.hpp"

using namespace ssvc;
using namespace ssvc::container;

namespace {

std::vector<std::uint8_t> framed(std::size_t body, std::uint8_t fill) {
  return entropy::frame_chunk(std::vector<std::uint8_t>(body, fill));
}

GlobalHeader header_3_frames() {
  GlobalHeader h;
  h.width = 64;
  h.height = 48;
  h.frame_count = 3;
  h.gop_size = 3;
  h.quality_index = 2;
  return h;
}

// One object, one GoP of 3 frames: object, background, (motion, residual) x 2.
GopPayload one_object_gop() {
  GopPayload g;
  g.objects.push_back(ObjectRecord{0, PixelBox{10, 5, 30, 20}, 0});
  g.chunks = {{ChunkKind::object, 0, 0, framed(5, 1)},   {ChunkKind::background, 0, 0, framed(9, 2)},
              {ChunkKind::motion, 0, 1, framed(3, 3)},   {ChunkKind::residual, 0, 1, framed(7, 4)},
              {ChunkKind::motion, 0, 2, framed(1, 5)},   {ChunkKind::residual, 0, 2, framed(2, 6)}};
  return g;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::argument;
}

}  // namespace

TEST_CASE("container: six-entry GoP matches a hand-built byte layout") {
  const GlobalHeader h = header_3_frames();
  const std::vector<GopPayload> gops{one_object_gop()};
  const auto bytes = serialize_stream(h, gops);

  oracle::Bytes o;
  o.raw({'S', 'S', 'B', '1'});
  o.u8(1);
  o.u16(64);
  o.u16(48);
  o.u32(3);
  o.u8(3);
  o.u8(16);
  o.u16(384);
  o.u8(1);
  o.u8(1);
  o.u8(2);
  REQUIRE(o.v.size() == 20);
  o.u16(1);
  for (unsigned v : {0u, 10u, 5u, 30u, 20u, 0u}) o.u16(v);
  o.u16(6);
  const std::uint32_t header_len = 20 + 2 + 12 + 2 + 6 * 15;
  std::uint32_t offset = header_len;
  const unsigned kinds[6] = {0, 1, 2, 3, 2, 3};
  const unsigned frames[6] = {0, 0, 1, 1, 2, 2};
  for (int i = 0; i < 6; ++i) {
    const auto len = static_cast<std::uint32_t>(gops[0].chunks[i].bytes.size());
    o.u8(kinds[i]);
    o.u16(0);
    o.u32(frames[i]);
    o.u32(offset);
    o.u32(len);
    offset += len;
  }
  for (const auto& c : gops[0].chunks) o.raw(c.bytes);
  CHECK(bytes == o.v);

  const StreamView view = parse_stream(bytes);
  CHECK(view.header.header_bytes == header_len);
  CHECK(view.header.gops.at(0).chunks.size() == 6);

  // (motion, frame 2) is the fifth chunk.
  const ByteRange r = locate_chunk(view.header, ChunkKind::motion, 2);
  const std::uint32_t fifth = header_len + 13 + 17 + 11 + 15;
  CHECK(r.offset == fifth);
  CHECK(r.length == 9);
  CHECK(entropy::unframe_chunk(std::span(bytes).subspan(r.offset, r.length)).size() == 1);

  const ByteRange first = locate_chunk(view.header, ChunkKind::object, 0, std::uint16_t{0});
  CHECK(first.offset == header_len);
  CHECK(kind_of([&] { locate_chunk(view.header, ChunkKind::object, 0, std::uint16_t{3}); }) == ErrorKind::not_found);
  CHECK(kind_of([&] { locate_chunk(view.header, ChunkKind::motion, 7); }) == ErrorKind::not_found);
}

TEST_CASE("container: degenerate single-frame stream") {
  GlobalHeader h;
  h.width = 16;
  h.height = 16;
  h.frame_count = 1;
  h.gop_size = 1;
  GopPayload g;
  g.chunks.push_back({ChunkKind::background, 0, 0, framed(4, 9)});
  const std::vector<GopPayload> gops{g};
  const auto bytes = serialize_stream(h, gops);
  const auto parsed = parse_stream(bytes);
  CHECK(parsed.header.gops.size() == 1);
  CHECK(parsed.header.gops[0].chunks.size() == 1);
  CHECK(bytes.size() == 20 + 2 + 2 + 15 + 12);
}

TEST_CASE("container: header-only parsing") {
  const GlobalHeader h = header_3_frames();
  const std::vector<GopPayload> gops{one_object_gop()};
  const auto bytes = serialize_stream(h, gops);
  const std::size_t header_len = 20 + 2 + 12 + 2 + 90;

  SUBCASE("header bytes alone suffice") {
    const auto p = parse_header_only(std::span(bytes).first(header_len));
    CHECK(p.header_bytes == header_len);
    CHECK(p.gops[0].objects == gops[0].objects);
  }
  SUBCASE("truncated one byte into the first payload chunk") {
    CHECK_NOTHROW(parse_header_only(std::span(bytes).first(header_len + 1)));
    CHECK(kind_of([&] { parse_stream(std::span(bytes).first(header_len + 1)); }) == ErrorKind::truncation);
  }
  SUBCASE("truncation reports the needed length") {
    try {
      parse_header_only(std::span(bytes).first(header_len - 1));
      FAIL("expected truncation");
    } catch (const TruncationError& e) {
      CHECK(e.needed() == header_len);
      CHECK(e.available() == header_len - 1);
    }
  }
  SUBCASE("bad magic and version") {
    auto b = bytes;
    b[0] = 'X';
    CHECK(kind_of([&] { parse_header_only(b); }) == ErrorKind::format);
    b = bytes;
    b[4] = 2;
    CHECK(kind_of([&] { parse_header_only(b); }) == ErrorKind::format);
  }
  SUBCASE("trailing bytes are structural") {
    auto b = bytes;
    b.push_back(0);
    CHECK(kind_of([&] { parse_stream(b); }) == ErrorKind::structural);
  }
}

TEST_CASE("container: serializer rejects inconsistent input") {
  const GlobalHeader h = header_3_frames();
  SUBCASE("chunk out of order") {
    auto g = one_object_gop();
    std::swap(g.chunks[2], g.chunks[3]);
    const std::vector<GopPayload> gops{g};
    CHECK(kind_of([&] { serialize_stream(h, gops); }) == ErrorKind::structural);
  }
  SUBCASE("missing chunk") {
    auto g = one_object_gop();
    g.chunks.pop_back();
    const std::vector<GopPayload> gops{g};
    CHECK(kind_of([&] { serialize_stream(h, gops); }) == ErrorKind::structural);
  }
  SUBCASE("wrong region index") {
    auto g = one_object_gop();
    g.objects[0].region = 1;
    const std::vector<GopPayload> gops{g};
    CHECK(kind_of([&] { serialize_stream(h, gops); }) == ErrorKind::structural);
  }
  SUBCASE("box outside the frame") {
    auto g = one_object_gop();
    g.objects[0].bbox.a2 = 65;
    const std::vector<GopPayload> gops{g};
    CHECK(kind_of([&] { serialize_stream(h, gops); }) == ErrorKind::structural);
  }
  SUBCASE("too many objects") {
    auto g = one_object_gop();
    g.objects.assign(65536, g.objects[0]);
    const std::vector<GopPayload> gops{g};
    CHECK(kind_of([&] { serialize_stream(h, gops); }) == ErrorKind::capacity);
  }
  SUBCASE("GoP count mismatch") {
    const std::vector<GopPayload> gops{one_object_gop(), one_object_gop()};
    CHECK(kind_of([&] { serialize_stream(h, gops); }) == ErrorKind::structural);
  }
}

TEST_CASE("container: random streams roundtrip with exact accounting") {
  fixture::Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto s = fixture::random_stream(rng);
    const auto bytes = serialize_stream(s.header, s.gops);
    const StreamView view = parse_stream(bytes);
    CHECK(view.header.global == s.header);
    CHECK(payloads(view) == s.gops);
    CHECK(view.header.header_bytes + view.header.payload_bytes() == bytes.size());
    CHECK(header_size(view.header.gops) == view.header.header_bytes);
    // Skip property: each chunk is intact on its own.
    for (const auto& g : view.header.gops) {
      for (const auto& e : g.chunks) CHECK_NOTHROW(entropy::unframe_chunk(view.chunk(e)));
    }
  }
}

TEST_CASE("container: 25 frames with GoP 10 gives i-frames 0, 10, 20") {
  GlobalHeader h;
  h.frame_count = 25;
  h.gop_size = 10;
  CHECK(h.gop_count() == 3);
  CHECK(h.gop_first_frame(2) == 20);
  CHECK(h.gop_frame_count(2) == 5);
  CHECK(expected_chunk_order(h, 2, 0).size() == 1 + 2 * 4);
}

TEST_CASE("latent box uses floor/ceil expansion") {
  CHECK(latent_box(PixelBox{17, 0, 33, 16}, 16, 4, 4) == CellBox{1, 0, 3, 1});
  CHECK(latent_box(PixelBox{0, 0, 64, 64}, 16, 4, 4) == CellBox{0, 0, 4, 4});
  CHECK(latent_box(PixelBox{15, 15, 16, 16}, 16, 4, 4) == CellBox{0, 0, 1, 1});
}
