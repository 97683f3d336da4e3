#pragma once

// Raw video ingestion and output: YUV4MPEG2 (4:2:0, 8-bit) and numbered
// PGM/PPM image sequences.

#include <filesystem>
#include <string>
#include <vector>

#include "ssvc/frame.hpp"

namespace ssvc::video {

struct Video {
  std::vector<Frame> frames;
  int fps_num = 30;
  int fps_den = 1;

  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
};

Video parse_y4m(const std::string& bytes);
std::string format_y4m(const Video& video);

Video read_y4m(const std::filesystem::path& path);
void write_y4m(const std::filesystem::path& path, const Video& video);

// `pattern` holds one printf-style integer field, e.g. "frames/f%03d.ppm".
// Frames are read from index `first` until the first missing file. PPM input
// is converted to 4:2:0 with BT.601 studio-swing coefficients; PGM input
// becomes luma with neutral chroma.
Video read_image_sequence(const std::string& pattern, int first = 0);

// Writes luma as PGM when `gray`, else PPM via the inverse conversion.
void write_image_sequence(const std::string& pattern, const Video& video, bool gray = false,
                          int first = 0);

void write_pgm(const std::filesystem::path& path, const Plane& plane);
void write_ppm(const std::filesystem::path& path, const Frame& frame);

// Reads .y4m files, or an image-sequence pattern when the path contains '%'.
Video read_video(const std::string& path);

std::string sequence_path(const std::string& pattern, int index);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace ssvc::video
