#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "ssvc/error.hpp"
#include "ssvc/video_io.hpp"

using namespace ssvc;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of_y4m(const std::string& bytes) {
  try {
    video::parse_y4m(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("video: y4m roundtrip, odd sizes included") {
  fixture::Rng rng(2);
  for (auto [w, h] : {std::pair{16, 16}, std::pair{35, 19}}) {
    video::Video v;
    v.fps_num = 25;
    v.fps_den = 2;
    for (int i = 0; i < 3; ++i) v.frames.push_back(fixture::random_frame(w, h, rng));
    const std::string bytes = video::format_y4m(v);
    CHECK(bytes.rfind("YUV4MPEG2 W" + std::to_string(w) + " H" + std::to_string(h), 0) == 0);
    const auto back = video::parse_y4m(bytes);
    CHECK(back.frames == v.frames);
    CHECK(back.fps_num == 25);
    CHECK(back.fps_den == 2);
    CHECK(back.frames[0].planes[1].width == (w + 1) / 2);
  }
}

TEST_CASE("video: y4m errors") {
  CHECK(kind_of_y4m("") == ErrorKind::format);
  CHECK(kind_of_y4m("RIFF....") == ErrorKind::format);
  CHECK(kind_of_y4m("YUV4MPEG2 F30:1\n") == ErrorKind::format);
  CHECK(kind_of_y4m("YUV4MPEG2 W4 H4 C444\nFRAME\n") == ErrorKind::format);
  CHECK(kind_of_y4m("YUV4MPEG2 W4 H4\nFRAME\n" + std::string(10, 'x')) == ErrorKind::format);
  CHECK(kind_of_y4m("YUV4MPEG2 W4 H4\nFRAMX\n" + std::string(24, 'x')) == ErrorKind::format);
  // Frame parameters after the marker are accepted.
  CHECK(video::parse_y4m("YUV4MPEG2 W4 H4 C420jpeg\nFRAME Ixyz\n" + std::string(24, 'x')).frames.size() == 1);
  CHECK_THROWS_AS(video::read_y4m("/nonexistent/clip.y4m"), Error);
}

TEST_CASE("video: image sequences") {
  const auto dir = scratch("ssvc_seq_test");
  fixture::Rng rng(4);
  video::Video v;
  for (int i = 0; i < 3; ++i) v.frames.push_back(fixture::random_frame(20, 14, rng));

  const std::string gray = (dir / "g%03d.pgm").string();
  video::write_image_sequence(gray, v, true, 1);
  CHECK(fs::exists(dir / "g001.pgm"));
  CHECK(video::sequence_path(gray, 7) == (dir / "g007.pgm").string());
  const auto g = video::read_image_sequence(gray, 1);
  REQUIRE(g.frames.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(g.frames[i].planes[0] == v.frames[i].planes[0]);
    for (auto s : g.frames[i].planes[1].data) CHECK(s == 128);
  }

  // Colour goes through RGB and back: a few code values of drift at most.
  video::Video smooth;
  for (int i = 0; i < 2; ++i) smooth.frames.push_back(fixture::smooth_frame(24, 16, rng));
  const std::string colour = (dir / "c%d.ppm").string();
  video::write_image_sequence(colour, smooth);
  const auto c = video::read_video(colour);
  REQUIRE(c.frames.size() == 2);
  for (int p = 0; p < 3; ++p) {
    int worst = 0;
    for (std::size_t k = 0; k < c.frames[0].planes[p].data.size(); ++k) {
      worst = std::max(worst, std::abs(c.frames[0].planes[p].data[k] - smooth.frames[0].planes[p].data[k]));
    }
    CHECK(worst <= (p == 0 ? 2 : 6));
  }

  CHECK_THROWS_AS(video::read_image_sequence((dir / "none%d.pgm").string()), Error);
  video::write_file(dir / "z0.pgm", "P2\n1 1\n255\n0\n");
  CHECK_THROWS_AS(video::read_image_sequence((dir / "z%d.pgm").string()), Error);
  video::write_pgm(dir / "m0.pgm", Plane(4, 4, 1));
  video::write_pgm(dir / "m1.pgm", Plane(6, 4, 1));
  CHECK_THROWS_AS(video::read_image_sequence((dir / "m%d.pgm").string()), Error);
  fs::remove_all(dir);
}
