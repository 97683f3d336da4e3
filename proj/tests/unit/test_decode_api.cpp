#include "consistency.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "ssvc/codec.hpp"
#include "ssvc/decode_api.hpp"
#include "ssvc/error.hpp"
#include "ssvc/synthetic.hpp"

using namespace ssvc;

namespace {

struct Encoded {
  std::vector<Frame> frames;
  std::vector<std::uint8_t> bytes;
};

Encoded two_object_stream(int w, int h, int n, int gop) {
  Encoded e;
  for (int i = 0; i < n; ++i) e.frames.push_back(synthetic::texture_window(w, h, 2 * i, i, 17));
  semantics::AnnotationSet ann;
  ann.by_frame[0].push_back(ObjectRecord{0, PixelBox{0, 0, 20, 20}, 0});   // person
  ann.by_frame[0].push_back(ObjectRecord{2, PixelBox{40, 30, 64, 48}, 0}); // car
  codec::EncoderConfig cfg;
  cfg.gop_size = gop;
  cfg.quality = 2;
  e.bytes = codec::encode_video(e.frames, &ann, cfg).bytes;
  return e;
}

ErrorKind kind_of(const std::vector<std::uint8_t>& bytes, const decode::DecodeRequest& r) {
  try {
    decode::decode(bytes, r);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("decode: header mode reads only the header") {
  const auto e = two_object_stream(64, 48, 5, 3);
  decode::DecodeRequest r;
  r.mode = decode::Mode::header;
  const auto res = decode::decode(e.bytes, r);
  const auto parsed = container::parse_header_only(e.bytes);
  CHECK(res.bits.bytes_read() == parsed.header_bytes);
  CHECK(res.bits.chunks.empty());
  REQUIRE(res.objects.size() == 2);
  CHECK(res.objects[0].record.class_id == 0);
  CHECK(res.objects[1].record.bbox == PixelBox{40, 30, 64, 48});
  CHECK(decode::savings_report(e.bytes, r) == doctest::Approx(double(parsed.header_bytes) / e.bytes.size()));
  r.mode = decode::Mode::full;
  CHECK(decode::savings_report(e.bytes, r) == doctest::Approx(1.0));
}

TEST_CASE("decode: object restriction equals the full decode") {
  const auto e = two_object_stream(64, 48, 5, 3);
  const auto full = codec::decode_video(e.bytes);
  decode::DecodeRequest r;
  r.mode = decode::Mode::objects;
  r.objects = {0};
  r.gop = 0;
  const auto res = decode::decode(e.bytes, r);
  REQUIRE(res.frames.size() == 1);
  const auto& pf = res.frames[0];
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      const bool inside = x < 32 && y < 32;  // 20x20 box rounded out to 16-px cells
      CHECK_EQ(pf.valid.at(x, y), inside ? 1 : 0);
      CHECK_EQ(pf.image.planes[0].at(x, y), inside ? full[0].planes[0].at(x, y) : 128);
    }
  }
  CHECK(consistency::matches_restriction(pf, full[0]));
  REQUIRE(res.bits.chunks.size() == 1);
  CHECK(res.bits.chunks[0].entry.kind == container::ChunkKind::object);
}

TEST_CASE("decode: class filter selects matching objects only") {
  const auto e = two_object_stream(64, 48, 5, 3);
  decode::DecodeRequest r;
  r.mode = decode::Mode::objects;
  r.classes = {*class_id_from_name("person")};
  const auto res = decode::decode(e.bytes, r);
  // Only GoP 0 is annotated.
  REQUIRE(res.objects.size() == 1);
  CHECK(res.objects[0].index == 0);
  REQUIRE(res.bits.chunks.size() == 1);
  CHECK(res.bits.chunks[0].entry.index == 0);
  r.classes = {*class_id_from_name("dog")};
  CHECK(kind_of(e.bytes, r) == ErrorKind::not_found);
}

TEST_CASE("decode: every mode is consistent with the full decode") {
  for (int gop : {1, 3, 10}) {
    const auto e = two_object_stream(64, 48, 7, gop);
    const auto rep = consistency::check_modes(e.bytes);
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.failures.empty());
    CHECK(rep.requests > 5);
  }
  // Unaligned frame size: accounting and masks still hold.
  const auto e = two_object_stream(70, 50, 4, 2);
  const auto rep = consistency::check_modes(e.bytes);
  for (const auto& f : rep.failures) MESSAGE(f);
  CHECK(rep.failures.empty());
}

TEST_CASE("decode: argument and lookup errors") {
  const auto e = two_object_stream(64, 48, 4, 2);
  decode::DecodeRequest r;
  r.mode = decode::Mode::objects;
  CHECK(kind_of(e.bytes, r) == ErrorKind::argument);
  r.mode = decode::Mode::object_tube;
  r.objects = {0, 1};
  CHECK(kind_of(e.bytes, r) == ErrorKind::argument);
  r.objects = {0};
  r.gop = 9;
  CHECK(kind_of(e.bytes, r) == ErrorKind::not_found);
  decode::DecodeRequest backwards;
  backwards.first_frame = 3;
  backwards.last_frame = 1;
  CHECK(kind_of(e.bytes, backwards) == ErrorKind::argument);
}

TEST_CASE("decode: pixel limit") {
  const auto e = two_object_stream(64, 48, 4, 2);
  decode::DecodeRequest r;
  decode::DecodeLimits lim;
  lim.max_pixels = 64 * 48 * 3;
  CHECK_THROWS_AS(decode::decode(e.bytes, r, lim), Error);
  lim.max_pixels = 64 * 48 * 4;
  CHECK(decode::decode(e.bytes, r, lim).frames.size() == 4);
}

TEST_CASE("decode: damaged payload is reported, header mode still works") {
  auto e = two_object_stream(64, 48, 4, 2);
  const auto parsed = container::parse_header_only(e.bytes);
  const auto& bg = parsed.gops[0].chunks[1];
  e.bytes[bg.offset + 10] ^= 0x5A;
  decode::DecodeRequest r;
  CHECK(kind_of(e.bytes, r) == ErrorKind::checksum);
  r.mode = decode::Mode::header;
  CHECK(decode::decode(e.bytes, r).objects.size() == 2);
}
