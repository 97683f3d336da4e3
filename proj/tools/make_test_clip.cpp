// Writes the bundled synthetic evaluation clip and its annotation sidecar.

#include <fmt/core.h>

#include <CLI11.hpp>

#include "ssvc/error.hpp"
#include "ssvc/synthetic.hpp"
#include "ssvc/video_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic test clip"};
  std::string output = "test_clip.y4m";
  std::string annotations = "test_clip.csv";
  int width = 352;
  int height = 288;
  int frames = 32;
  app.add_option("-o,--output", output, "Output .y4m");
  app.add_option("-a,--annotations", annotations, "Output annotation sidecar");
  app.add_option("--width", width)->check(CLI::Range(16, 4096));
  app.add_option("--height", height)->check(CLI::Range(16, 4096));
  app.add_option("--frames", frames)->check(CLI::Range(1, 10000));
  CLI11_PARSE(app, argc, argv);

  try {
    const auto clip = ssvc::synthetic::test_clip(width, height, frames);
    ssvc::video::write_y4m(output, ssvc::video::Video{clip.frames, 30, 1});
    ssvc::video::write_file(annotations, clip.annotation_text());
    fmt::print("wrote {} frames ({}x{}) to {} and {}\n", frames, width, height, output, annotations);
  } catch (const ssvc::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
