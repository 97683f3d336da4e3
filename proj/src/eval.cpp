#include "ssvc/eval.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "parallel.hpp"
#include "ssvc/container.hpp"
#include "ssvc/decode_api.hpp"
#include "ssvc/error.hpp"
#include "ssvc/partition.hpp"
#include "ssvc/transform.hpp"
#include "ssvc/video_io.hpp"

namespace ssvc::eval {

namespace {

constexpr std::array<double, 5> kMsSsimWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr int kWindow = 11;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

const std::array<double, kWindow>& gaussian_window() {
  static const std::array<double, kWindow> w = [] {
    std::array<double, kWindow> g{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double x = i - kWindow / 2;
      g[i] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
      sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
  }();
  return w;
}

// Valid-region separable Gaussian filter.
PlaneF filter(const PlaneF& in) {
  const auto& g = gaussian_window();
  PlaneF tmp(in.width - kWindow + 1, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < tmp.width; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * in.at(x + k, y);
      tmp.at(x, y) = s;
    }
  }
  PlaneF out(tmp.width, in.height - kWindow + 1);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * tmp.at(x, y + k);
      out.at(x, y) = s;
    }
  }
  return out;
}

struct SsimTerms {
  double ssim = 0.0;
  double cs = 0.0;
};

SsimTerms ssim_terms(const PlaneF& a, const PlaneF& b) {
  PlaneF aa(a.width, a.height);
  PlaneF bb(a.width, a.height);
  PlaneF ab(a.width, a.height);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    aa.data[i] = a.data[i] * a.data[i];
    bb.data[i] = b.data[i] * b.data[i];
    ab.data[i] = a.data[i] * b.data[i];
  }
  const PlaneF mu_a = filter(a);
  const PlaneF mu_b = filter(b);
  const PlaneF e_aa = filter(aa);
  const PlaneF e_bb = filter(bb);
  const PlaneF e_ab = filter(ab);
  double ssim = 0.0;
  double cs = 0.0;
  for (std::size_t i = 0; i < mu_a.data.size(); ++i) {
    const double ma = mu_a.data[i];
    const double mb = mu_b.data[i];
    const double va = e_aa.data[i] - ma * ma;
    const double vb = e_bb.data[i] - mb * mb;
    const double cov = e_ab.data[i] - ma * mb;
    const double c = (2.0 * cov + kC2) / (va + vb + kC2);
    cs += c;
    ssim += c * (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
  }
  const auto n = static_cast<double>(mu_a.data.size());
  return {ssim / n, cs / n};
}

PlaneF downsample(const PlaneF& in) {
  PlaneF out(in.width / 2, in.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = 0.25 * (in.at(2 * x, 2 * y) + in.at(2 * x + 1, 2 * y) + in.at(2 * x, 2 * y + 1) +
                             in.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

PlaneF to_real(const Plane& p) {
  PlaneF out(p.width, p.height);
  for (std::size_t i = 0; i < p.data.size(); ++i) out.data[i] = p.data[i];
  return out;
}

double quality_of(const RDPoint& p, QualityAxis axis) {
  return axis == QualityAxis::psnr ? p.psnr : ms_ssim_db(p.msssim);
}

struct Cubic {
  std::array<double, 4> c{};  // c0 + c1 x + c2 x^2 + c3 x^3

  double integral(double lo, double hi) const {
    auto prim = [&](double x) {
      return c[0] * x + c[1] * x * x / 2.0 + c[2] * x * x * x / 3.0 + c[3] * x * x * x * x / 4.0;
    };
    return prim(hi) - prim(lo);
  }
};

Cubic fit_log_rate(std::span<const RDPoint> curve, QualityAxis axis) {
  const auto n = static_cast<Eigen::Index>(curve.size());
  Eigen::MatrixXd v(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RDPoint& p = curve[static_cast<std::size_t>(i)];
    if (!(p.bpp > 0.0)) fail(ErrorKind::argument, "BD-rate needs positive rates");
    const double q = quality_of(p, axis);
    v(i, 0) = 1.0;
    v(i, 1) = q;
    v(i, 2) = q * q;
    v(i, 3) = q * q * q;
    y(i) = std::log10(p.bpp);
  }
  const auto qr = v.colPivHouseholderQr();
  if (qr.rank() < 4) fail(ErrorKind::argument, "BD-rate curve needs four distinct quality values");
  const Eigen::VectorXd c = qr.solve(y);
  return Cubic{{c(0), c(1), c(2), c(3)}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
  const double mse = codec::frame_mse(a, b);
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double psnr(std::span<const Frame> a, std::span<const Frame> b) {
  if (a.size() != b.size() || a.empty()) fail(ErrorKind::dimension, "PSNR needs equally long, non-empty sequences");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += psnr(a[i], b[i]);
  return sum / static_cast<double>(a.size());
}

MsSsim ms_ssim(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) fail(ErrorKind::dimension, "MS-SSIM needs equal sizes");
  int scales = 0;
  for (int s = 1; s <= 5; ++s) {
    if ((std::min(a.width, a.height) >> (s - 1)) >= kWindow) scales = s;
  }
  if (scales == 0) fail(ErrorKind::dimension, "MS-SSIM needs frames of at least 11x11");
  double weight_sum = 0.0;
  for (int s = 0; s < scales; ++s) weight_sum += kMsSsimWeights[s];
  PlaneF x = to_real(a);
  PlaneF y = to_real(b);
  double value = 1.0;
  for (int s = 0; s < scales; ++s) {
    const SsimTerms t = ssim_terms(x, y);
    const double w = kMsSsimWeights[s] / weight_sum;
    const double term = s + 1 == scales ? t.ssim : t.cs;
    value *= std::pow(std::max(term, 0.0), w);
    if (s + 1 < scales) {
      x = downsample(x);
      y = downsample(y);
    }
  }
  return MsSsim{std::clamp(value, 0.0, 1.0), scales, scales < 5};
}

MsSsim ms_ssim(std::span<const Frame> a, std::span<const Frame> b) {
  if (a.size() != b.size() || a.empty()) fail(ErrorKind::dimension, "MS-SSIM needs equally long, non-empty sequences");
  MsSsim out{0.0, 5, false};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const MsSsim m = ms_ssim(a[i].planes[0], b[i].planes[0]);
    out.value += m.value;
    out.scales = m.scales;
    out.reduced = m.reduced;
  }
  out.value /= static_cast<double>(a.size());
  return out;
}

double ms_ssim_db(double value) {
  if (value >= 1.0) return kPsnrCap;
  return -10.0 * std::log10(1.0 - value);
}

double bpp(std::uint64_t stream_bytes, int width, int height, std::uint64_t frames) {
  const double pixels = static_cast<double>(width) * height * static_cast<double>(frames);
  if (!(pixels > 0.0)) fail(ErrorKind::argument, "bpp needs a positive pixel count");
  return 8.0 * static_cast<double>(stream_bytes) / pixels;
}

double bd_rate(std::span<const RDPoint> anchor, std::span<const RDPoint> test, QualityAxis axis) {
  if (anchor.size() < 4 || test.size() < 4) fail(ErrorKind::argument, "BD-rate needs at least 4 points per curve");
  auto range = [axis](std::span<const RDPoint> c) {
    double lo = quality_of(c[0], axis);
    double hi = lo;
    for (const RDPoint& p : c) {
      lo = std::min(lo, quality_of(p, axis));
      hi = std::max(hi, quality_of(p, axis));
    }
    return std::pair{lo, hi};
  };
  const auto [alo, ahi] = range(anchor);
  const auto [tlo, thi] = range(test);
  const double lo = std::max(alo, tlo);
  const double hi = std::min(ahi, thi);
  if (!(hi > lo)) fail(ErrorKind::argument, "BD-rate curves do not overlap in quality");
  const Cubic fa = fit_log_rate(anchor, axis);
  const Cubic ft = fit_log_rate(test, axis);
  const double avg = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

StreamBreakdown stream_breakdown(std::span<const std::uint8_t> bytes) {
  const auto view = container::parse_stream(bytes);
  StreamBreakdown out;
  out.header_bytes = view.header.header_bytes;
  out.total_bytes = bytes.size();
  for (const auto& g : view.header.gops) {
    for (const auto& e : g.chunks) {
      switch (e.kind) {
        case container::ChunkKind::object: out.object_bytes += e.length; break;
        case container::ChunkKind::background: out.background_bytes += e.length; break;
        case container::ChunkKind::motion: out.motion_bytes += e.length; break;
        case container::ChunkKind::residual: out.residual_bytes += e.length; break;
      }
    }
  }
  return out;
}

std::vector<RungResult> rd_sweep(std::span<const Frame> frames, const semantics::AnnotationSet* annotations,
                                 const SweepConfig& cfg) {
  if (frames.empty()) fail(ErrorKind::argument, "RD sweep needs frames");
  std::vector<RungResult> rungs(cfg.qualities.size());
  const bool parallel_rungs = cfg.qualities.size() > 1;
  detail::parallel_for(cfg.qualities.size(), cfg.threads, [&](std::size_t i) {
    codec::EncoderConfig enc = cfg.encoder;
    enc.quality = cfg.qualities[i];
    enc.threads = parallel_rungs ? 1 : cfg.threads;
    const auto encoded = codec::encode_video(frames, annotations, enc);
    const auto decoded = codec::decode_video(encoded.bytes, enc.threads);

    RungResult& r = rungs[i];
    r.quality = enc.quality;
    r.step = transform::quantizer_step(enc.quality);
    r.lambda = codec::lambda_for_quality(enc.quality);
    r.closed_loop = decoded == encoded.reconstruction;
    r.point.bpp = bpp(encoded.bytes.size(), frames[0].width(), frames[0].height(), frames.size());
    r.point.psnr = psnr(frames, decoded);
    r.point.msssim = ms_ssim(frames, decoded).value;
    r.point.label = "q" + std::to_string(enc.quality) + " lambda=" + std::to_string(static_cast<int>(r.lambda));
    r.streams = stream_breakdown(encoded.bytes);
    r.frames = encoded.frames;
    r.gops = encoded.gops;

    const auto view = container::parse_stream(encoded.bytes);
    const auto& gop0 = view.header.gops.front();
    const auto layout = codec::gop_layout(view.header.global, gop0);
    std::vector<std::size_t> sizes(layout.regions.size(), 0);
    for (const auto& e : gop0.chunks) {
      if (e.kind == container::ChunkKind::object) sizes[e.index] = e.length;
      if (e.kind == container::ChunkKind::background) sizes.back() = e.length;
    }
    r.regions = partition::region_bit_report(layout, sizes, frames[0].width(), frames[0].height());
  });
  return rungs;
}

void write_reports(const std::filesystem::path& dir, std::span<const RungResult> rungs) {
  std::filesystem::create_directories(dir);
  std::ostringstream rd;
  std::ostringstream streams;
  std::ostringstream frames;
  std::ostringstream regions;
  rd.precision(10);
  frames.precision(10);
  regions.precision(10);
  rd << "quality,step,lambda,bpp,psnr,msssim,msssim_db,closed_loop,label\n";
  streams << "quality,header_bytes,object_bytes,background_bytes,motion_bytes,residual_bytes,total_bytes\n";
  frames << "quality,frame,type,bits,motion_bits,residual_bits,bpp,mse,psnr\n";
  regions << "quality,region,kind,objects,bits,bpp,fraction\n";
  for (const RungResult& r : rungs) {
    rd << r.quality << ',' << r.step << ',' << r.lambda << ',' << r.point.bpp << ',' << r.point.psnr << ','
       << r.point.msssim << ',' << ms_ssim_db(r.point.msssim) << ',' << (r.closed_loop ? 1 : 0) << ','
       << csv_escape(r.point.label) << '\n';
    const auto& s = r.streams;
    streams << r.quality << ',' << s.header_bytes << ',' << s.object_bytes << ',' << s.background_bytes << ','
            << s.motion_bytes << ',' << s.residual_bytes << ',' << s.total_bytes << '\n';
    for (const auto& f : r.frames) {
      frames << r.quality << ',' << f.frame << ',' << (f.intra ? 'I' : 'P') << ',' << f.bits << ','
             << f.motion_bits << ',' << f.residual_bits << ',' << f.bpp << ',' << f.mse << ',' << f.psnr << '\n';
    }
    for (const auto& g : r.regions) {
      std::string objects;
      for (std::size_t k = 0; k < g.objects.size(); ++k) objects += (k ? " " : "") + std::to_string(g.objects[k]);
      regions << r.quality << ',' << g.region << ','
              << (g.kind == partition::RegionKind::object ? "object" : "background") << ',' << objects << ','
              << g.bits << ',' << g.bpp << ',' << g.fraction << '\n';
    }
  }
  video::write_file(dir / "rd.csv", rd.str());
  video::write_file(dir / "streams.csv", streams.str());
  video::write_file(dir / "frames.csv", frames.str());
  video::write_file(dir / "regions.csv", regions.str());
}

std::vector<RDPoint> read_rd_csv(const std::filesystem::path& path) {
  std::istringstream in(video::read_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::format, path.string() + ": empty RD table");
  std::vector<std::string> columns;
  {
    std::istringstream h(line);
    for (std::string c; std::getline(h, c, ',');) columns.push_back(c);
  }
  auto column = [&](const char* name) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    fail(ErrorKind::format, path.string() + ": missing column " + name);
  };
  const std::size_t cb = column("bpp");
  const std::size_t cp = column("psnr");
  const std::size_t cm = column("msssim");
  std::vector<RDPoint> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream l(line);
    for (std::string c; std::getline(l, c, ',');) cells.push_back(c);
    try {
      out.push_back(RDPoint{std::stod(cells.at(cb)), std::stod(cells.at(cp)), std::stod(cells.at(cm)), ""});
    } catch (const std::exception&) {
      fail(ErrorKind::format, path.string() + ":" + std::to_string(line_no) + ": malformed RD row");
    }
  }
  return out;
}

}  // namespace ssvc::eval
