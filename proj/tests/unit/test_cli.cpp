#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "ssvc/container.hpp"
#include "ssvc/synthetic.hpp"
#include "ssvc/video_io.hpp"

using namespace ssvc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run ssvc_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = std::string("SSVC_LOG=quiet ") + SSVC_CLI_PATH + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = video::read_file(log);
  return r;
}

struct Workspace {
  fs::path dir;
  std::string clip;
  std::string ann;
  std::string ssb;

  Workspace() {
    dir = fs::temp_directory_path() / "ssvc_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto c = synthetic::test_clip(96, 64, 5);
    clip = (dir / "clip.y4m").string();
    ann = (dir / "clip.csv").string();
    ssb = (dir / "clip.ssb").string();
    video::write_y4m(clip, video::Video{c.frames, 30, 1});
    video::write_file(ann, c.annotation_text());
  }
  ~Workspace() { fs::remove_all(dir); }
};

nlohmann::json report(const fs::path& dir) { return nlohmann::json::parse(video::read_file(dir / "report.json")); }

}  // namespace

TEST_CASE("cli: encode, inspect, extract, decode") {
  Workspace ws;
  const auto& d = ws.dir;
  auto enc = ssvc_cli("encode -i " + ws.clip + " -a " + ws.ann + " -o " + ws.ssb + " -g 3 -q 1 --recon " +
                          (d / "recon.y4m").string(),
                      d);
  REQUIRE_MESSAGE(enc.code == 0, enc.out);
  CHECK(enc.out.find("bpp") != std::string::npos);

  auto ins = ssvc_cli("inspect -i " + ws.ssb, d);
  CHECK(ins.code == 0);
  CHECK(ins.out.find("OK") != std::string::npos);

  const std::string bytes = video::read_file(ws.ssb);
  const auto parsed = container::parse_header_only({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});

  auto hdr = ssvc_cli("extract -i " + ws.ssb + " -m header -o " + (d / "hdr").string(), d);
  REQUIRE(hdr.code == 0);
  CHECK(report(d / "hdr")["bits"]["bytes_read"] == parsed.header_bytes);
  CHECK(fs::exists(d / "hdr" / "objects.csv"));

  for (const char* mode : {"object=0", "class=person", "background", "motion", "residual", "tube=0", "full"}) {
    const auto out = d / "x";
    fs::remove_all(out);
    auto r = ssvc_cli("extract -i " + ws.ssb + " -m " + mode + " -o " + out.string(), d);
    CHECK_MESSAGE(r.code == 0, mode, r.out);
    if (r.code != 0) continue;
    const auto j = report(out);
    std::uint64_t sum = j["bits"]["header_bytes"];
    for (const auto& c : j["bits"]["chunks"]) sum += c["length"].get<std::uint64_t>();
    CHECK(j["bits"]["bytes_read"] == sum);
    if (std::string(mode) == "full") CHECK(j["bits"]["bytes_read"] == bytes.size());
  }
  CHECK(fs::exists(d / "x" / "frame_000004.ppm"));

  auto dec = ssvc_cli("decode -i " + ws.ssb + " -o " + (d / "dec.y4m").string(), d);
  REQUIRE(dec.code == 0);
  CHECK(video::read_y4m(d / "dec.y4m").frames == video::read_y4m(d / "recon.y4m").frames);
  auto part = ssvc_cli("decode -i " + ws.ssb + " --frames 1..2 -o " + (d / "p%02d.ppm").string(), d);
  CHECK(part.code == 0);
  CHECK(fs::exists(d / "p01.ppm"));
  CHECK(fs::exists(d / "p02.ppm"));

  auto ev = ssvc_cli("eval --reference " + ws.clip + " --distorted " + (d / "dec.y4m").string(), d);
  CHECK(ev.code == 0);
  CHECK(ev.out.find("psnr") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
  Workspace ws;
  const auto& d = ws.dir;
  REQUIRE(ssvc_cli("encode -i " + ws.clip + " -o " + ws.ssb + " -g 5", d).code == 0);
  CHECK(ssvc_cli("inspect -i " + (d / "missing.ssb").string(), d).code == 1);
  CHECK(ssvc_cli("extract -i " + ws.ssb + " -m object=3 --gop 0 -o " + (d / "o").string(), d).code == 4);
  CHECK(ssvc_cli("extract -i " + ws.ssb + " -m motion --frames 100..200 -o " + (d / "o").string(), d).code == 4);
  CHECK(ssvc_cli("extract -i " + ws.ssb + " -m bogus -o " + (d / "o").string(), d).code == 2);

  std::string bytes = video::read_file(ws.ssb);
  video::write_file(d / "trunc.ssb", bytes.substr(0, 25));
  auto tr = ssvc_cli("inspect -i " + (d / "trunc.ssb").string(), d);
  CHECK(tr.code == 2);
  CHECK(tr.out.find("INVALID") != std::string::npos);
  bytes[bytes.size() - 3] ^= 0x40;
  video::write_file(d / "flip.ssb", bytes);
  auto fl = ssvc_cli("inspect -i " + (d / "flip.ssb").string(), d);
  CHECK(fl.code == 2);
  CHECK(fl.out.find("first bad offset") != std::string::npos);
  CHECK(ssvc_cli("decode -i " + (d / "flip.ssb").string() + " -o " + (d / "f.y4m").string(), d).code == 2);

  // Randomly mutated files never crash the inspector.
  fixture::Rng rng(31);
  const std::string clean = video::read_file(ws.ssb);
  for (int t = 0; t < 40; ++t) {
    std::string m = clean;
    const int flips = fixture::uniform_int(rng, 1, 8);
    for (int k = 0; k < flips; ++k) {
      m[static_cast<std::size_t>(fixture::uniform_int(rng, 0, static_cast<int>(m.size()) - 1))] ^=
          static_cast<char>(1 << fixture::uniform_int(rng, 0, 7));
    }
    if (t % 4 == 0) m.resize(static_cast<std::size_t>(fixture::uniform_int(rng, 0, static_cast<int>(m.size()))));
    video::write_file(d / "fuzz.ssb", m);
    const int code = ssvc_cli("inspect -i " + (d / "fuzz.ssb").string(), d).code;
    CHECK((code == 0 || code == 2));
  }
}
