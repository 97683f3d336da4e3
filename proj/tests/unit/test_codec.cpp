#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ssvc/codec.hpp"
#include "ssvc/error.hpp"
#include "ssvc/synthetic.hpp"
#include "ssvc/transform.hpp"

using namespace ssvc;

namespace {

std::vector<Frame> moving_clip(int w, int h, int n, std::uint64_t seed) {
  std::vector<Frame> frames;
  for (int i = 0; i < n; ++i) frames.push_back(synthetic::texture_window(w, h, 3 * i, -i, seed));
  return frames;
}

}  // namespace

TEST_CASE("codec: single-frame GoP is the intra path") {
  fixture::Rng rng(51);
  const Frame f = fixture::smooth_frame(70, 50, rng);
  for (int q = 0; q < 4; ++q) {
    codec::EncoderConfig cfg;
    cfg.quality = q;
    const auto enc = codec::encode_video(std::span(&f, 1), nullptr, cfg);
    const double step = transform::quantizer_step(q);
    const Frame want = crop_frame(
        transform::synthesis(transform::dequantize_latent(
            transform::quantize_latent(transform::analysis(pad_frame(f, 16)), step), step)),
        70, 50);
    CHECK(enc.reconstruction.at(0) == want);
    const auto dec = codec::decode_video(enc.bytes);
    REQUIRE(dec.size() == 1);
    CHECK(dec[0] == want);
  }
}

TEST_CASE("codec: closed loop matches the decoder on every frame") {
  const auto frames = moving_clip(72, 56, 7, 9);
  semantics::AnnotationSet ann;
  ann.by_frame[0].push_back(ObjectRecord{0, PixelBox{5, 6, 30, 40}, 0});
  ann.by_frame[0].push_back(ObjectRecord{2, PixelBox{20, 30, 60, 50}, 0});
  ann.by_frame[4].push_back(ObjectRecord{2, PixelBox{40, 0, 72, 20}, 0});
  codec::EncoderConfig cfg;
  cfg.gop_size = 4;
  cfg.quality = 1;
  const auto enc = codec::encode_video(frames, &ann, cfg);
  const auto dec = codec::decode_video(enc.bytes, 1);
  REQUIRE(dec.size() == frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) CHECK(dec[i] == enc.reconstruction[i]);
  CHECK(codec::decode_video(enc.bytes, 4) == dec);
  // Overlapping objects share one region.
  const auto parsed = container::parse_header_only(enc.bytes);
  CHECK(parsed.gops[0].objects[0].region == 0);
  CHECK(parsed.gops[0].objects[1].region == 0);
  CHECK(parsed.gops[0].region_count() == 1);
  CHECK(parsed.gops[1].objects.size() == 1);
  CHECK(enc.gops.size() == 2);
  for (const auto& s : enc.frames) CHECK(s.psnr > 30.0);
}

TEST_CASE("codec: fixed-length GoPs") {
  const auto frames = moving_clip(32, 32, 25, 3);
  codec::EncoderConfig cfg;
  cfg.gop_size = 10;
  cfg.quality = 3;
  const auto enc = codec::encode_video(frames, nullptr, cfg);
  CHECK(enc.header.gop_count() == 3);
  for (const auto& s : enc.frames) CHECK(s.intra == (s.frame % 10 == 0));
  std::uint64_t bits = 0;
  for (const auto& s : enc.frames) bits += s.bits;
  const auto parsed = container::parse_stream(enc.bytes);
  CHECK(bits == 8 * parsed.header.payload_bytes());
}

TEST_CASE("codec: static content makes cheap p-frames") {
  fixture::Rng rng(52);
  const Frame f = fixture::smooth_frame(96, 80, rng);
  const std::vector<Frame> frames{f, f, f};
  const auto gop = codec::encode_gop(frames, {}, codec::EncoderConfig{});
  REQUIRE(gop.frames.size() == 3);
  CHECK(gop.frames[1].bits < gop.frames[0].bits / 10);
  CHECK(gop.frames[2].bits < gop.frames[0].bits / 10);
  CHECK(gop.rd.lambda == 2048);
  CHECK(gop.rd.cost == doctest::Approx(gop.rd.rate + gop.rd.lambda * gop.rd.distortion));
}

TEST_CASE("codec: bits fall and error grows along the ladder") {
  const auto clip = synthetic::test_clip(176, 144, 6);
  double prev_bytes = 1e300;
  double prev_mse = -1;
  for (int q = 0; q < 4; ++q) {
    codec::EncoderConfig cfg;
    cfg.quality = q;
    cfg.gop_size = 6;
    const auto enc = codec::encode_video(clip.frames, nullptr, cfg);
    double mse = 0;
    for (const auto& s : enc.frames) mse += s.mse;
    CHECK(static_cast<double>(enc.bytes.size()) < prev_bytes);
    CHECK(mse >= prev_mse);
    prev_bytes = static_cast<double>(enc.bytes.size());
    prev_mse = mse;
  }
  CHECK(codec::lambda_for_quality(0) == 2048);
  CHECK(codec::lambda_for_quality(3) == 256);
}

TEST_CASE("codec: input errors") {
  codec::EncoderConfig cfg;
  std::vector<Frame> drift{Frame(32, 32, 1), Frame(48, 32, 1)};
  try {
    codec::encode_video(drift, nullptr, cfg);
    FAIL("accepted a size change");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension);
  }
  CHECK_THROWS_AS(codec::encode_video(std::vector<Frame>{}, nullptr, cfg), Error);
  cfg.gop_size = 0;
  CHECK_THROWS_AS(codec::encode_video(std::vector<Frame>{Frame(16, 16)}, nullptr, cfg), Error);
}

TEST_CASE("codec: a tampered quantizer step is rejected") {
  const auto frames = moving_clip(32, 32, 1, 4);
  codec::EncoderConfig cfg;
  const auto enc = codec::encode_video(frames, nullptr, cfg);
  auto bytes = enc.bytes;
  bytes[19] = 2;  // quality index
  try {
    codec::decode_video(bytes);
    FAIL("decoded with the wrong step");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
  }
}
