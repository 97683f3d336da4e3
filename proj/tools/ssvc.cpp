// ssvc: encode, decode, extract, inspect and evaluate .ssb streams.

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "ssvc/codec.hpp"
#include "ssvc/container.hpp"
#include "ssvc/decode_api.hpp"
#include "ssvc/entropy/range_coder.hpp"
#include "ssvc/error.hpp"
#include "ssvc/eval.hpp"
#include "ssvc/objects.hpp"
#include "ssvc/simd/kernels.hpp"
#include "ssvc/transform.hpp"
#include "ssvc/video_io.hpp"

namespace fs = std::filesystem;
using namespace ssvc;

namespace {

enum Exit { kOk = 0, kIo = 1, kFormat = 2, kCapacity = 3, kNotFound = 4 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return kIo;
    case ErrorKind::capacity: return kCapacity;
    case ErrorKind::not_found: return kNotFound;
    default: return kFormat;
  }
}

// SSVC_LOG: quiet, info (default) or debug.
int log_level() {
  static const int level = [] {
    const char* v = std::getenv("SSVC_LOG");
    if (v == nullptr) return 1;
    const std::string s = v;
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
  }();
  return level;
}

template <typename... Args>
void log_info(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= 1) fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void log_debug(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= 2) fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string s = video::read_file(path);
  return {s.begin(), s.end()};
}

struct FrameRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0xFFFFFFFFu;
};

// "a..b", "a.." or a single index.
FrameRange parse_range(const std::string& text) {
  FrameRange r;
  if (text.empty()) return r;
  try {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      r.first = r.last = static_cast<std::uint32_t>(std::stoul(text));
    } else {
      if (dots > 0) r.first = static_cast<std::uint32_t>(std::stoul(text.substr(0, dots)));
      if (dots + 2 < text.size()) r.last = static_cast<std::uint32_t>(std::stoul(text.substr(dots + 2)));
    }
  } catch (const std::exception&) {
    fail(ErrorKind::argument, "bad frame range '" + text + "'");
  }
  if (r.first > r.last) fail(ErrorKind::argument, "empty frame range '" + text + "'");
  return r;
}

decode::DecodeRequest parse_mode(const std::string& mode) {
  decode::DecodeRequest req;
  const auto eq = mode.find('=');
  const std::string name = mode.substr(0, eq);
  const std::string arg = eq == std::string::npos ? "" : mode.substr(eq + 1);
  auto index = [&]() -> std::uint16_t {
    try {
      const unsigned long v = std::stoul(arg);
      if (v > 65535) throw std::out_of_range("index");
      return static_cast<std::uint16_t>(v);
    } catch (const std::exception&) {
      fail(ErrorKind::argument, "mode " + name + " needs an object index, e.g. " + name + "=0");
    }
  };
  if (name == "header") {
    req.mode = decode::Mode::header;
  } else if (name == "object") {
    req.mode = decode::Mode::objects;
    req.objects.push_back(index());
  } else if (name == "class") {
    req.mode = decode::Mode::objects;
    auto id = class_id_from_name(arg);
    if (!id) fail(ErrorKind::argument, "unknown class name '" + arg + "'");
    req.classes.push_back(*id);
  } else if (name == "background") {
    req.mode = decode::Mode::background;
  } else if (name == "motion") {
    req.mode = decode::Mode::motion;
  } else if (name == "residual") {
    req.mode = decode::Mode::residual;
  } else if (name == "tube") {
    req.mode = decode::Mode::object_tube;
    req.objects.push_back(index());
  } else if (name == "full") {
    req.mode = decode::Mode::full;
  } else {
    fail(ErrorKind::argument, "unknown extraction mode '" + mode + "'");
  }
  return req;
}

nlohmann::json bit_report_json(const decode::BitReport& b) {
  nlohmann::json j;
  j["header_bytes"] = b.header_bytes;
  j["object_bytes"] = b.object_bytes;
  j["background_bytes"] = b.background_bytes;
  j["motion_bytes"] = b.motion_bytes;
  j["residual_bytes"] = b.residual_bytes;
  j["bytes_read"] = b.bytes_read();
  j["file_bytes"] = b.file_bytes;
  j["fraction"] = b.fraction();
  j["chunks"] = nlohmann::json::array();
  for (const auto& c : b.chunks) {
    j["chunks"].push_back({{"gop", c.gop},
                           {"kind", container::to_string(c.entry.kind)},
                           {"index", c.entry.index},
                           {"frame", c.entry.frame},
                           {"offset", c.entry.offset},
                           {"length", c.entry.length}});
  }
  return j;
}

void print_bit_report(const decode::BitReport& b) {
  fmt::print("bytes read   {} of {} ({:.4f}%)\n", b.bytes_read(), b.file_bytes, 100.0 * b.fraction());
  fmt::print("  header     {}\n  object     {}\n  background {}\n  motion     {}\n  residual   {}\n",
             b.header_bytes, b.object_bytes, b.background_bytes, b.motion_bytes, b.residual_bytes);
}

std::string object_line(std::uint32_t gop, std::uint16_t index, const ObjectRecord& o) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", gop, index, o.class_id, class_name(o.class_id), o.bbox.a1,
                     o.bbox.b1, o.bbox.a2, o.bbox.b2, o.region);
}

std::string objects_text(const std::vector<decode::SelectedObject>& objects) {
  std::string out = "gop,index,class_id,class,a1,b1,a2,b2,region\n";
  for (const auto& o : objects) out += object_line(o.gop, o.index, o.record) + "\n";
  return out;
}

void write_motion(const fs::path& path, const intercode::MotionField& f) {
  // int32 little-endian: dx plane then dy plane, rows x cols each.
  std::string out;
  auto put = [&](std::int32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((static_cast<std::uint32_t>(v) >> (8 * i)) & 0xFF));
  };
  for (auto v : f.dx) put(v);
  for (auto v : f.dy) put(v);
  video::write_file(path, out);
}

Plane mask_image(const Mask& m) {
  Plane p = m;
  for (auto& v : p.data) v = v ? 255 : 0;
  return p;
}

// --- subcommands ---------------------------------------------------------

struct EncodeArgs {
  std::string input;
  std::string annotations;
  std::string output;
  std::string recon;
  int gop = 10;
  int quality = 0;
  int search_range = 16;
  int motion_block = 8;
  int motion_step = 1;
  bool fast_search = false;
};

int run_encode(const EncodeArgs& a, int threads) {
  const auto input = video::read_video(a.input);
  log_info("read {} frames of {}x{} from {}", input.frames.size(), input.width(), input.height(), a.input);
  std::optional<semantics::AnnotationSet> ann;
  if (!a.annotations.empty()) {
    ann = semantics::load_annotations(a.annotations, input.width(), input.height());
    for (const auto& w : ann->warnings) fmt::print(stderr, "warning: {}\n", w);
  }
  codec::EncoderConfig cfg;
  cfg.gop_size = a.gop;
  cfg.quality = a.quality;
  cfg.search.range = a.search_range;
  cfg.search.block = a.motion_block;
  cfg.search.exhaustive = !a.fast_search;
  cfg.motion_step = a.motion_step;
  cfg.threads = threads;
  const auto result = codec::encode_video(input.frames, ann ? &*ann : nullptr, cfg);
  video::write_file(a.output, std::string(result.bytes.begin(), result.bytes.end()));
  if (!a.recon.empty()) video::write_y4m(a.recon, video::Video{result.reconstruction, input.fps_num, input.fps_den});

  const auto s = eval::stream_breakdown(result.bytes);
  const auto& h = result.header;
  const auto view = container::parse_header_only(result.bytes);
  std::size_t objects = 0;
  for (const auto& g : view.gops) objects += g.objects.size();
  fmt::print("frames       {} ({}x{})\n", h.frame_count, h.width, h.height);
  fmt::print("gops         {} (size {})\n", h.gop_count(), h.gop_size);
  fmt::print("quality      {} (step {}, lambda {})\n", h.quality_index, transform::quantizer_step(h.quality_index),
             codec::lambda_for_quality(h.quality_index));
  fmt::print("objects      {}\n", objects);
  fmt::print("bytes        {}\n", result.bytes.size());
  fmt::print("bpp          {:.6f}\n", eval::bpp(result.bytes.size(), h.width, h.height, h.frame_count));
  fmt::print("psnr         {:.4f} dB\n", eval::psnr(input.frames, result.reconstruction));
  fmt::print("streams      header {} object {} background {} motion {} residual {}\n", s.header_bytes,
             s.object_bytes, s.background_bytes, s.motion_bytes, s.residual_bytes);
  for (std::size_t g = 0; g < result.gops.size(); ++g) {
    const auto& c = result.gops[g];
    fmt::print("gop {:<4}     rate {:.6f} bpp  distortion {:.8f}  J {:.6f}\n", g, c.rate, c.distortion, c.cost);
  }
  return kOk;
}

int run_decode(const std::string& in, const std::string& out, const std::string& range) {
  const auto bytes = read_bytes(in);
  decode::DecodeRequest req;
  req.mode = decode::Mode::full;
  const auto r = parse_range(range);
  req.first_frame = r.first;
  req.last_frame = r.last;
  const auto result = decode::decode(bytes, req);
  video::Video v;
  for (const auto& f : result.frames) v.frames.push_back(f.image);
  if (out.find('%') != std::string::npos) {
    video::write_image_sequence(out, v, false, static_cast<int>(result.frames.front().frame));
  } else {
    video::write_y4m(out, v);
  }
  fmt::print("decoded {} frames to {}\n", v.frames.size(), out);
  print_bit_report(result.bits);
  return kOk;
}

int run_extract(const std::string& in, const std::string& mode, const std::string& range,
                std::optional<std::uint32_t> gop, const std::string& out_dir) {
  const auto bytes = read_bytes(in);
  auto req = parse_mode(mode);
  const auto r = parse_range(range);
  req.first_frame = r.first;
  req.last_frame = r.last;
  req.gop = gop;
  const auto result = decode::decode(bytes, req);
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  if (req.mode == decode::Mode::header) {
    const std::string text = objects_text(result.objects);
    video::write_file(dir / "objects.csv", text);
    fmt::print("{}", text);
  } else if (!result.objects.empty()) {
    video::write_file(dir / "objects.csv", objects_text(result.objects));
  }
  for (const auto& f : result.frames) {
    video::write_ppm(dir / fmt::format("frame_{:06}.ppm", f.frame), f.image);
    video::write_pgm(dir / fmt::format("frame_{:06}_mask.pgm", f.frame), mask_image(f.valid));
  }
  nlohmann::json motion = nlohmann::json::array();
  for (const auto& m : result.motion) {
    const std::string name = fmt::format("motion_{:06}.bin", m.frame);
    write_motion(dir / name, m.field);
    motion.push_back({{"frame", m.frame}, {"file", name}, {"rows", m.field.rows}, {"cols", m.field.cols},
                      {"block", m.field.block}, {"units", "quarter-pel int32le, dx plane then dy plane"}});
  }
  for (const auto& rf : result.residuals) {
    // float64 little-endian planes Y, Cb, Cr at the padded coding size.
    std::string raw;
    for (const auto& p : rf.residual.planes) {
      raw.append(reinterpret_cast<const char*>(p.data.data()), p.data.size() * sizeof(double));
    }
    video::write_file(dir / fmt::format("residual_{:06}.f64", rf.frame), raw);
  }
  nlohmann::json report;
  report["mode"] = decode::to_string(req.mode);
  report["bits"] = bit_report_json(result.bits);
  report["motion"] = motion;
  report["frames"] = result.frames.size();
  video::write_file(dir / "report.json", report.dump(2) + "\n");
  fmt::print("mode {}: {} frames, {} motion fields, {} residuals -> {}\n", decode::to_string(req.mode),
             result.frames.size(), result.motion.size(), result.residuals.size(), dir.string());
  print_bit_report(result.bits);
  return kOk;
}

int run_inspect(const std::string& in) {
  const auto bytes = read_bytes(in);
  fmt::print("file         {} ({} bytes)\n", in, bytes.size());
  container::ParsedHeader header;
  try {
    header = container::parse_header_only(bytes);
  } catch (const TruncationError& e) {
    fmt::print("INVALID: header truncated: needs {} bytes, file ends at offset {}\n", e.needed(), e.available());
    return kFormat;
  } catch (const Error& e) {
    fmt::print("INVALID: {} error: {}\n", to_string(e.kind()), e.what());
    return kFormat;
  }
  const auto& h = header.global;
  fmt::print("version      {}\n", h.version);
  fmt::print("size         {}x{}, {} frames, GoP {}, {} GoPs\n", h.width, h.height, h.frame_count, h.gop_size,
             h.gop_count());
  fmt::print("latent       stride {}, {} channels, transform {}, entropy {}, quality {}\n", h.stride, h.channels,
             h.transform_id, h.entropy_model_id, h.quality_index);
  fmt::print("header bytes {}\n", header.header_bytes);
  bool ok = true;
  std::optional<std::size_t> first_bad;
  fmt::print("{:>4} {:>10} {:>5} {:>8} {:>10} {:>8}  status\n", "gop", "kind", "index", "frame", "offset", "length");
  for (std::size_t g = 0; g < header.gops.size(); ++g) {
    const auto& sem = header.gops[g];
    for (std::size_t k = 0; k < sem.objects.size(); ++k) {
      fmt::print("     object {}: {}\n", k, object_line(static_cast<std::uint32_t>(g), static_cast<std::uint16_t>(k), sem.objects[k]));
    }
    for (const auto& e : sem.chunks) {
      std::string status = "ok";
      if (static_cast<std::uint64_t>(e.offset) + e.length > bytes.size()) {
        status = "truncated";
      } else {
        try {
          entropy::unframe_chunk(std::span(bytes).subspan(e.offset, e.length));
        } catch (const Error& err) {
          status = std::string(to_string(err.kind())) + ": " + err.what();
        }
      }
      if (status != "ok") {
        ok = false;
        if (!first_bad) first_bad = e.offset;
      }
      fmt::print("{:>4} {:>10} {:>5} {:>8} {:>10} {:>8}  {}\n", g, container::to_string(e.kind), e.index, e.frame,
                 e.offset, e.length, status);
    }
  }
  const std::uint64_t total = header.header_bytes + header.payload_bytes();
  if (total != bytes.size()) {
    ok = false;
    if (!first_bad) first_bad = std::min<std::uint64_t>(total, bytes.size());
    fmt::print("accounting   header + chunks = {} bytes, file has {}\n", total, bytes.size());
  }
  if (ok) {
    fmt::print("OK\n");
    return kOk;
  }
  fmt::print("INVALID: first bad offset {}\n", *first_bad);
  return kFormat;
}

struct EvalArgs {
  std::string input;
  std::string annotations;
  std::string output_dir = "rd_report";
  std::vector<int> qualities{0, 1, 2, 3};
  int gop = 10;
  std::string anchor;
  std::string test;
  std::string axis = "psnr";
  std::string reference;
  std::string distorted;
};

int run_eval(const EvalArgs& a, int threads) {
  if (!a.anchor.empty() || !a.test.empty()) {
    if (a.anchor.empty() || a.test.empty()) fail(ErrorKind::argument, "--anchor and --test go together");
    const auto axis = a.axis == "msssim" ? eval::QualityAxis::msssim_db : eval::QualityAxis::psnr;
    const double bd = eval::bd_rate(eval::read_rd_csv(a.anchor), eval::read_rd_csv(a.test), axis);
    fmt::print("bd-rate ({}) {:.4f}%\n", a.axis, bd);
    return kOk;
  }
  if (!a.reference.empty() || !a.distorted.empty()) {
    if (a.reference.empty() || a.distorted.empty()) fail(ErrorKind::argument, "--reference and --distorted go together");
    const auto ref = video::read_video(a.reference);
    const auto dis = video::read_video(a.distorted);
    const auto ms = eval::ms_ssim(ref.frames, dis.frames);
    if (ms.reduced) fmt::print(stderr, "warning: frames below 176x176; MS-SSIM uses {} scales\n", ms.scales);
    fmt::print("psnr    {:.4f} dB\nms-ssim {:.6f} ({:.4f} dB)\n", eval::psnr(ref.frames, dis.frames), ms.value,
               eval::ms_ssim_db(ms.value));
    return kOk;
  }
  if (a.input.empty()) fail(ErrorKind::argument, "eval needs --input, --anchor/--test or --reference/--distorted");
  const auto input = video::read_video(a.input);
  std::optional<semantics::AnnotationSet> ann;
  if (!a.annotations.empty()) ann = semantics::load_annotations(a.annotations, input.width(), input.height());
  eval::SweepConfig cfg;
  cfg.qualities = a.qualities;
  cfg.encoder.gop_size = a.gop;
  cfg.threads = threads;
  const auto rungs = eval::rd_sweep(input.frames, ann ? &*ann : nullptr, cfg);
  eval::write_reports(a.output_dir, rungs);
  fmt::print("{:>7} {:>6} {:>7} {:>10} {:>9} {:>9} {:>6}\n", "quality", "step", "lambda", "bpp", "psnr", "ms-ssim", "loop");
  for (const auto& r : rungs) {
    fmt::print("{:>7} {:>6} {:>7} {:>10.6f} {:>9.4f} {:>9.6f} {:>6}\n", r.quality, r.step, r.lambda, r.point.bpp,
               r.point.psnr, r.point.msssim, r.closed_loop ? "ok" : "DRIFT");
  }
  fmt::print("reports written to {}\n", a.output_dir);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantically structured video codec"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode a Y4M file or image sequence");
  encode->add_option("-i,--input", enc.input, "Input .y4m or printf-style image pattern")->required();
  encode->add_option("-a,--annotations", enc.annotations, "Object annotations (frame,class,x,y,w,h)");
  encode->add_option("-o,--output", enc.output, "Output .ssb")->required();
  encode->add_option("--recon", enc.recon, "Also write the reconstruction as .y4m");
  encode->add_option("-g,--gop", enc.gop, "GoP size")->check(CLI::Range(1, 255));
  encode->add_option("-q,--quality", enc.quality, "Quality index 0 (best) .. 3")->check(CLI::Range(0, 3));
  encode->add_option("--search-range", enc.search_range, "Motion search range in pixels")->check(CLI::Range(0, 64));
  encode->add_option("--motion-block", enc.motion_block, "Motion block size")->check(CLI::IsMember({4, 8, 16}));
  encode->add_option("--motion-step", enc.motion_step, "Motion quantizer step (1 = lossless)")->check(CLI::Range(1, 64));
  encode->add_flag("--fast-search", enc.fast_search, "Diamond motion search instead of the full search");

  std::string dec_in, dec_out, dec_range;
  auto* dec = app.add_subcommand("decode", "Fully decode a stream");
  dec->add_option("-i,--input", dec_in, "Input .ssb")->required();
  dec->add_option("-o,--output", dec_out, "Output .y4m or printf-style PPM pattern")->required();
  dec->add_option("--frames", dec_range, "Frame range a..b");

  std::string ex_in, ex_mode, ex_range, ex_out;
  std::optional<std::uint32_t> ex_gop;
  auto* extract = app.add_subcommand("extract", "Partially decode a stream");
  extract->add_option("-i,--input", ex_in, "Input .ssb")->required();
  extract->add_option("-m,--mode", ex_mode,
                      "header | object=K | class=NAME | background | motion | residual | tube=K | full")
      ->required();
  extract->add_option("--frames", ex_range, "Frame range a..b (motion, residual, full)");
  extract->add_option("--gop", ex_gop, "GoP selector (object, class, background, tube)");
  extract->add_option("-o,--output", ex_out, "Output directory")->required();

  std::string in_path;
  auto* inspect = app.add_subcommand("inspect", "Check a stream and print its chunk map");
  inspect->add_option("-i,--input", in_path, "Input file")->required();

  EvalArgs ev;
  auto* evaluate = app.add_subcommand("eval", "RD sweep, BD-rate, or quality metrics");
  evaluate->add_option("-i,--input", ev.input, "Video for an RD sweep");
  evaluate->add_option("-a,--annotations", ev.annotations, "Object annotations for the sweep");
  evaluate->add_option("-o,--output-dir", ev.output_dir, "Directory for the CSV reports");
  evaluate->add_option("--qualities", ev.qualities, "Quality ladder")->delimiter(',');
  evaluate->add_option("-g,--gop", ev.gop, "GoP size")->check(CLI::Range(1, 255));
  evaluate->add_option("--anchor", ev.anchor, "Anchor rd.csv for BD-rate");
  evaluate->add_option("--test", ev.test, "Test rd.csv for BD-rate");
  evaluate->add_option("--axis", ev.axis, "BD-rate quality axis")->check(CLI::IsMember({"psnr", "msssim"}));
  evaluate->add_option("--reference", ev.reference, "Reference video for PSNR / MS-SSIM");
  evaluate->add_option("--distorted", ev.distorted, "Distorted video for PSNR / MS-SSIM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFormat;
  }

  log_debug("kernels: {}", simd::kernels().name);
  try {
    if (*encode) return run_encode(enc, threads);
    if (*dec) return run_decode(dec_in, dec_out, dec_range);
    if (*extract) return run_extract(ex_in, ex_mode, ex_range, ex_gop, ex_out);
    if (*inspect) return run_inspect(in_path);
    if (*evaluate) return run_eval(ev, threads);
  } catch (const Error& e) {
    fmt::print(stderr, "error ({}): {}\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    fmt::print(stderr, "error (capacity): out of memory\n");
    return kCapacity;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFormat;
  }
  return kOk;
}
