#include "ssvc/video_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssvc/error.hpp"

namespace ssvc::video {

namespace {

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Splits "num:den" tokens from the Y4M header parameter list.
bool parse_ratio(std::string_view s, int& num, int& den) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return false;
  auto r1 = std::from_chars(s.data(), s.data() + colon, num);
  auto r2 = std::from_chars(s.data() + colon + 1, s.data() + s.size(), den);
  return r1.ec == std::errc{} && r2.ec == std::errc{} && den > 0;
}

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    fail(ErrorKind::format, std::string("malformed ") + what);
  }
  return v;
}

struct PnmImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::string pixels;
};

PnmImage parse_pnm(const std::string& bytes, const std::string& name) {
  std::size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  PnmImage img;
  const std::string magic = token();
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    fail(ErrorKind::format, name + ": only binary PGM (P5) and PPM (P6) are supported");
  }
  img.width = parse_int(token(), "PNM width");
  img.height = parse_int(token(), "PNM height");
  const int maxval = parse_int(token(), "PNM maxval");
  if (maxval != 255) fail(ErrorKind::format, name + ": only 8-bit images are supported");
  if (img.width <= 0 || img.height <= 0) fail(ErrorKind::format, name + ": empty image");
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (pos + n > bytes.size()) fail(ErrorKind::format, name + ": truncated raster");
  img.pixels = bytes.substr(pos, n);
  return img;
}

Frame rgb_to_frame(const PnmImage& img) {
  Frame f(img.width, img.height);
  const int cw = f.planes[1].width;
  const int ch = f.planes[1].height;
  PlaneF cb_full(img.width, img.height);
  PlaneF cr_full(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * img.width + x) * 3;
      const double r = static_cast<std::uint8_t>(img.pixels[i]);
      const double g = static_cast<std::uint8_t>(img.pixels[i + 1]);
      const double b = static_cast<std::uint8_t>(img.pixels[i + 2]);
      f.planes[0].at(x, y) = clamp_u8(16.0 + 0.256788 * r + 0.504129 * g + 0.097906 * b);
      cb_full.at(x, y) = 128.0 - 0.148223 * r - 0.290993 * g + 0.439216 * b;
      cr_full.at(x, y) = 128.0 + 0.439216 * r - 0.367788 * g - 0.071427 * b;
    }
  }
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      double sb = 0.0;
      double sr = 0.0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int px = 2 * x + dx;
          const int py = 2 * y + dy;
          if (px < img.width && py < img.height) {
            sb += cb_full.at(px, py);
            sr += cr_full.at(px, py);
            ++n;
          }
        }
      }
      f.planes[1].at(x, y) = clamp_u8(sb / n);
      f.planes[2].at(x, y) = clamp_u8(sr / n);
    }
  }
  return f;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::io, "read error on " + path.string());
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "write error on " + path.string());
}

Video parse_y4m(const std::string& bytes) {
  const auto eol = bytes.find('\n');
  if (bytes.rfind("YUV4MPEG2", 0) != 0 || eol == std::string::npos) {
    fail(ErrorKind::format, "not a YUV4MPEG2 stream");
  }
  Video v;
  int w = 0;
  int h = 0;
  std::istringstream header(bytes.substr(0, eol));
  std::string tok;
  header >> tok;
  while (header >> tok) {
    const std::string_view val = std::string_view(tok).substr(1);
    switch (tok[0]) {
      case 'W': w = parse_int(val, "Y4M width"); break;
      case 'H': h = parse_int(val, "Y4M height"); break;
      case 'F':
        if (!parse_ratio(val, v.fps_num, v.fps_den)) fail(ErrorKind::format, "malformed Y4M frame rate");
        break;
      case 'C':
        if (val.rfind("420", 0) != 0) {
          fail(ErrorKind::format, "unsupported Y4M colour space " + std::string(val));
        }
        break;
      default: break;
    }
  }
  if (w <= 0 || h <= 0) fail(ErrorKind::format, "Y4M header lacks dimensions");
  const std::size_t luma = static_cast<std::size_t>(w) * h;
  const std::size_t chroma = static_cast<std::size_t>((w + 1) / 2) * ((h + 1) / 2);
  std::size_t pos = eol + 1;
  while (pos < bytes.size()) {
    const auto fe = bytes.find('\n', pos);
    if (bytes.compare(pos, 5, "FRAME") != 0 || fe == std::string::npos) {
      fail(ErrorKind::format, "malformed Y4M frame marker at byte " + std::to_string(pos));
    }
    pos = fe + 1;
    if (pos + luma + 2 * chroma > bytes.size()) fail(ErrorKind::format, "truncated Y4M frame");
    Frame f(w, h);
    for (auto& p : f.planes) {
      std::copy_n(bytes.data() + pos, p.data.size(), reinterpret_cast<char*>(p.data.data()));
      pos += p.data.size();
    }
    v.frames.push_back(std::move(f));
  }
  return v;
}

std::string format_y4m(const Video& video) {
  std::string out = "YUV4MPEG2 W" + std::to_string(video.width()) + " H" +
                    std::to_string(video.height()) + " F" + std::to_string(video.fps_num) + ":" +
                    std::to_string(video.fps_den) + " Ip A1:1 C420jpeg\n";
  for (const Frame& f : video.frames) {
    out += "FRAME\n";
    for (const auto& p : f.planes) out.append(reinterpret_cast<const char*>(p.data.data()), p.data.size());
  }
  return out;
}

Video read_y4m(const std::filesystem::path& path) { return parse_y4m(read_file(path)); }

void write_y4m(const std::filesystem::path& path, const Video& video) {
  write_file(path, format_y4m(video));
}

std::string sequence_path(const std::string& pattern, int index) {
  const int n = std::snprintf(nullptr, 0, pattern.c_str(), index);
  if (n < 0) fail(ErrorKind::argument, "bad sequence pattern " + pattern);
  std::string out(static_cast<std::size_t>(n) + 1, '\0');
  std::snprintf(out.data(), out.size(), pattern.c_str(), index);
  out.pop_back();
  return out;
}

Video read_image_sequence(const std::string& pattern, int first) {
  Video v;
  for (int i = first;; ++i) {
    const std::string path = sequence_path(pattern, i);
    if (!std::filesystem::exists(path)) break;
    const PnmImage img = parse_pnm(read_file(path), path);
    Frame f;
    if (img.channels == 1) {
      f = Frame(img.width, img.height, 128);
      std::copy(img.pixels.begin(), img.pixels.end(), f.planes[0].data.begin());
    } else {
      f = rgb_to_frame(img);
    }
    if (!v.frames.empty() && (f.width() != v.width() || f.height() != v.height())) {
      fail(ErrorKind::dimension, path + ": frame size changes within the sequence");
    }
    v.frames.push_back(std::move(f));
  }
  if (v.frames.empty()) fail(ErrorKind::io, "no frames match " + pattern);
  return v;
}

void write_pgm(const std::filesystem::path& path, const Plane& plane) {
  std::string out = "P5\n" + std::to_string(plane.width) + " " + std::to_string(plane.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(plane.data.data()), plane.data.size());
  write_file(path, out);
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double yy = 1.164383 * (frame.planes[0].at(x, y) - 16.0);
      const double cb = frame.planes[1].at(x / 2, y / 2) - 128.0;
      const double cr = frame.planes[2].at(x / 2, y / 2) - 128.0;
      out.push_back(static_cast<char>(clamp_u8(yy + 1.596027 * cr)));
      out.push_back(static_cast<char>(clamp_u8(yy - 0.391762 * cb - 0.812968 * cr)));
      out.push_back(static_cast<char>(clamp_u8(yy + 2.017232 * cb)));
    }
  }
  write_file(path, out);
}

void write_image_sequence(const std::string& pattern, const Video& video, bool gray, int first) {
  for (std::size_t i = 0; i < video.frames.size(); ++i) {
    const std::string path = sequence_path(pattern, first + static_cast<int>(i));
    if (gray) {
      write_pgm(path, video.frames[i].planes[0]);
    } else {
      write_ppm(path, video.frames[i]);
    }
  }
}

Video read_video(const std::string& path) {
  if (path.find('%') != std::string::npos) return read_image_sequence(path);
  return read_y4m(path);
}

}  // namespace ssvc::video
