#include "ssvc/intercode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "ssvc/entropy/models.hpp"
#include "ssvc/entropy/plane_coder.hpp"
#include "ssvc/error.hpp"
#include "ssvc/simd/kernels.hpp"
#include "ssvc/transform.hpp"

namespace ssvc::intercode {

namespace {

int floor_div(int a, int b) {
  const int q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

struct Candidate {
  int x = 0;  // integer pixels during the integer search, quarter-pel after
  int y = 0;
  std::uint64_t cost = 0;
};

// Total order: cost, then vector length, then raster position.
bool better(const Candidate& a, const Candidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  const int la = std::abs(a.x) + std::abs(a.y);
  const int lb = std::abs(b.x) + std::abs(b.y);
  if (la != lb) return la < lb;
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

// 16x the bilinear luma sample at quarter-pel position (qx, qy).
int luma_sample16(const Plane& ref, int qx, int qy) {
  const int x0 = floor_div(qx, 4);
  const int y0 = floor_div(qy, 4);
  const int fx = qx - 4 * x0;
  const int fy = qy - 4 * y0;
  const int xa = std::clamp(x0, 0, ref.width - 1);
  const int xb = std::clamp(x0 + 1, 0, ref.width - 1);
  const int ya = std::clamp(y0, 0, ref.height - 1);
  const int yb = std::clamp(y0 + 1, 0, ref.height - 1);
  return (4 - fx) * (4 - fy) * ref.at(xa, ya) + fx * (4 - fy) * ref.at(xb, ya) +
         (4 - fx) * fy * ref.at(xa, yb) + fx * fy * ref.at(xb, yb);
}

// 64x the bilinear chroma sample at eighth-pel position (qx, qy).
int chroma_sample64(const Plane& ref, int qx, int qy) {
  const int x0 = floor_div(qx, 8);
  const int y0 = floor_div(qy, 8);
  const int fx = qx - 8 * x0;
  const int fy = qy - 8 * y0;
  const int xa = std::clamp(x0, 0, ref.width - 1);
  const int xb = std::clamp(x0 + 1, 0, ref.width - 1);
  const int ya = std::clamp(y0, 0, ref.height - 1);
  const int yb = std::clamp(y0 + 1, 0, ref.height - 1);
  return (8 - fx) * (8 - fy) * ref.at(xa, ya) + fx * (8 - fy) * ref.at(xb, ya) +
         (8 - fx) * fy * ref.at(xa, yb) + fx * fy * ref.at(xb, yb);
}

std::uint64_t subpel_cost(const Plane& cur, const Plane& ref, int bx, int by, int block, int qx,
                          int qy) {
  std::uint64_t cost = 0;
  for (int y = 0; y < block; ++y) {
    for (int x = 0; x < block; ++x) {
      const int c = 16 * cur.at(bx + x, by + y);
      const int p = luma_sample16(ref, 4 * (bx + x) + qx, 4 * (by + y) + qy);
      cost += static_cast<std::uint64_t>(std::abs(c - p));
    }
  }
  return cost;
}

class BlockSearch {
 public:
  BlockSearch(const Plane& cur, const Plane& ref, int bx, int by, const SearchConfig& cfg, int px, int py)
      : cur_(cur), ref_(ref), bx_(bx), by_(by), cfg_(cfg), px_(px), py_(py) {}

  // Costs are kept in 1/16 SAD units so integer and sub-pel stages compare.
  std::uint64_t penalty(int qx, int qy) const {
    if (cfg_.mv_penalty == 0) return 0;
    const int d = std::min(std::abs(qx) + std::abs(qy), std::abs(qx - px_) + std::abs(qy - py_));
    return static_cast<std::uint64_t>(4) * static_cast<std::uint64_t>(cfg_.mv_penalty) * static_cast<std::uint64_t>(d);
  }

  bool in_range(int x, int y) const { return std::abs(x) <= cfg_.range && std::abs(y) <= cfg_.range; }

  Candidate eval(int x, int y) const {
    return Candidate{x, y, 16 * std::uint64_t{block_sad(cur_, ref_, bx_, by_, cfg_.block, x, y)} + penalty(4 * x, 4 * y)};
  }

  void consider(Candidate& best, int x, int y) const {
    if (!in_range(x, y)) return;
    const Candidate c = eval(x, y);
    if (better(c, best)) best = c;
  }

  Candidate exhaustive() const {
    Candidate best = eval(0, 0);
    for (int y = -cfg_.range; y <= cfg_.range; ++y) {
      for (int x = -cfg_.range; x <= cfg_.range; ++x) consider(best, x, y);
    }
    return best;
  }

  Candidate diamond(std::span<const std::array<int, 2>> starts) const {
    Candidate best = eval(0, 0);
    for (const auto& s : starts) consider(best, s[0], s[1]);
    static constexpr std::array<std::array<int, 2>, 8> kLarge{
        {{0, -2}, {-1, -1}, {1, -1}, {-2, 0}, {2, 0}, {-1, 1}, {1, 1}, {0, 2}}};
    static constexpr std::array<std::array<int, 2>, 4> kSmall{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
    for (int iter = 0; iter < 4 * cfg_.range + 4; ++iter) {
      Candidate next = best;
      for (const auto& d : kLarge) consider(next, best.x + d[0], best.y + d[1]);
      if (next.x == best.x && next.y == best.y) break;
      best = next;
    }
    Candidate next = best;
    for (const auto& d : kSmall) consider(next, best.x + d[0], best.y + d[1]);
    return next;
  }

  // Half-pel then quarter-pel steps around an integer vector; returns
  // quarter-pel units.
  Candidate refine(const Candidate& integer) const {
    const int limit = 4 * cfg_.range;
    Candidate best{4 * integer.x, 4 * integer.y, 0};
    best.cost = subpel_cost(cur_, ref_, bx_, by_, cfg_.block, best.x, best.y) + penalty(best.x, best.y);
    for (int step : {2, 1}) {
      Candidate next{};
      bool found = false;
      for (int dy = -step; dy <= step; dy += step) {
        for (int dx = -step; dx <= step; dx += step) {
          if (dx == 0 && dy == 0) continue;
          const int qx = best.x + dx;
          const int qy = best.y + dy;
          if (std::abs(qx) > limit || std::abs(qy) > limit) continue;
          const Candidate c{qx, qy, subpel_cost(cur_, ref_, bx_, by_, cfg_.block, qx, qy) + penalty(qx, qy)};
          if (!found || better(c, next)) {
            next = c;
            found = true;
          }
        }
      }
      if (found && next.cost < best.cost) best = next;
    }
    return best;
  }

 private:
  const Plane& cur_;
  const Plane& ref_;
  int bx_;
  int by_;
  const SearchConfig& cfg_;
  int px_;
  int py_;
};

int round_quarter(int q) { return floor_div(q + 2, 4); }

void refine_plane(const PlaneF& pred, PlaneF& out, const MotionField& field, int block) {
  std::vector<std::uint8_t> mark(pred.data.size(), 0);
  auto differs = [&](int r0, int c0, int r1, int c1) {
    const auto i = field.index(r0, c0);
    const auto j = field.index(r1, c1);
    return field.dx[i] != field.dx[j] || field.dy[i] != field.dy[j];
  };
  auto set = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < pred.width && y < pred.height) {
      mark[static_cast<std::size_t>(y) * pred.width + x] = 1;
    }
  };
  for (int r = 0; r < field.rows; ++r) {
    for (int c = 0; c < field.cols; ++c) {
      if (c + 1 < field.cols && differs(r, c, r, c + 1)) {
        const int x = (c + 1) * block;
        for (int y = r * block; y < (r + 1) * block; ++y) {
          set(x - 1, y);
          set(x, y);
        }
      }
      if (r + 1 < field.rows && differs(r, c, r + 1, c)) {
        const int y = (r + 1) * block;
        for (int x = c * block; x < (c + 1) * block; ++x) {
          set(x, y - 1);
          set(x, y);
        }
      }
    }
  }
  for (int y = 0; y < pred.height; ++y) {
    for (int x = 0; x < pred.width; ++x) {
      if (mark[static_cast<std::size_t>(y) * pred.width + x] == 0) continue;
      double sum = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          sum += pred.at(std::clamp(x + dx, 0, pred.width - 1), std::clamp(y + dy, 0, pred.height - 1));
        }
      }
      out.at(x, y) = sum / 9.0;
    }
  }
}

void check_field(const Frame& reference, const MotionField& field) {
  if (field.block < 2 || field.block % 2 != 0 || field.rows * field.block != reference.height() ||
      field.cols * field.block != reference.width()) {
    fail(ErrorKind::dimension, "motion field does not tile the reference frame");
  }
}

entropy::LatentGeometry motion_geometry(int rows, int cols) {
  return entropy::LatentGeometry{rows, cols, 2, 2, {0, 1}};
}

}  // namespace

bool MotionField::is_zero() const {
  return std::all_of(dx.begin(), dx.end(), [](int v) { return v == 0; }) &&
         std::all_of(dy.begin(), dy.end(), [](int v) { return v == 0; });
}

std::uint32_t block_sad(const Plane& current, const Plane& reference, int bx, int by, int block,
                        int ix, int iy) {
  const int x0 = bx + ix;
  const int y0 = by + iy;
  if (x0 >= 0 && y0 >= 0 && x0 + block <= reference.width && y0 + block <= reference.height) {
    return simd::kernels().sad(current.row(by) + bx, current.width, reference.row(y0) + x0,
                               reference.width, block, block);
  }
  std::uint32_t sad = 0;
  for (int y = 0; y < block; ++y) {
    const int ry = std::clamp(y0 + y, 0, reference.height - 1);
    for (int x = 0; x < block; ++x) {
      const int rx = std::clamp(x0 + x, 0, reference.width - 1);
      sad += static_cast<std::uint32_t>(std::abs(current.at(bx + x, by + y) - reference.at(rx, ry)));
    }
  }
  return sad;
}

MotionField estimate_motion(const Frame& current, const Frame& reference, const SearchConfig& cfg) {
  if (current.width() != reference.width() || current.height() != reference.height()) {
    fail(ErrorKind::dimension, "motion estimation needs frames of equal size");
  }
  if (cfg.block < 2 || cfg.block % 2 != 0 || cfg.range < 0 || current.width() % cfg.block != 0 ||
      current.height() % cfg.block != 0) {
    fail(ErrorKind::dimension, "frame size must be a multiple of an even motion block size");
  }
  const Plane& cur = current.planes[0];
  const Plane& ref = reference.planes[0];
  MotionField field(current.height() / cfg.block, current.width() / cfg.block, cfg.block);
  const int coarse = cfg.range / 2;
  for (int r = 0; r < field.rows; ++r) {
    for (int c = 0; c < field.cols; ++c) {
      // Mean of the causal neighbours, as the motion coder predicts it.
      int px = 0;
      int py = 0;
      int n = 0;
      if (c > 0) {
        px += field.dx[field.index(r, c - 1)];
        py += field.dy[field.index(r, c - 1)];
        ++n;
      }
      if (r > 0) {
        px += field.dx[field.index(r - 1, c)];
        py += field.dy[field.index(r - 1, c)];
        ++n;
      }
      if (n == 2) {
        px = floor_div(px, 2);
        py = floor_div(py, 2);
      }
      const BlockSearch search(cur, ref, c * cfg.block, r * cfg.block, cfg, px, py);
      Candidate integer;
      if (cfg.exhaustive) {
        integer = search.exhaustive();
      } else {
        std::vector<std::array<int, 2>> starts;
        auto predictor = [&](int pr, int pc) {
          if (pr < 0 || pc < 0 || pc >= field.cols) return;
          const auto i = field.index(pr, pc);
          starts.push_back({round_quarter(field.dx[i]), round_quarter(field.dy[i])});
        };
        predictor(r, c - 1);
        predictor(r - 1, c);
        predictor(r - 1, c + 1);
        if (coarse > 0) {
          for (int y = -1; y <= 1; ++y) {
            for (int x = -1; x <= 1; ++x) {
              if (x != 0 || y != 0) starts.push_back({x * coarse, y * coarse});
            }
          }
        }
        integer = search.diamond(starts);
      }
      Candidate final{4 * integer.x, 4 * integer.y, 0};
      if (cfg.subpel) final = search.refine(integer);
      const auto i = field.index(r, c);
      field.dx[i] = final.x;
      field.dy[i] = final.y;
    }
  }
  return field;
}

FrameF motion_compensate(const Frame& reference, const MotionField& field, bool refine) {
  check_field(reference, field);
  FrameF pred(reference.width(), reference.height());
  const int b = field.block;
  for (int y = 0; y < reference.height(); ++y) {
    for (int x = 0; x < reference.width(); ++x) {
      const auto i = field.index(y / b, x / b);
      pred.planes[0].at(x, y) = luma_sample16(reference.planes[0], 4 * x + field.dx[i], 4 * y + field.dy[i]) / 16.0;
    }
  }
  const int cb = b / 2;
  for (int p = 1; p < kPlaneCount; ++p) {
    const Plane& ref = reference.planes[p];
    PlaneF& out = pred.planes[p];
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        const auto i = field.index(std::min(y / cb, field.rows - 1), std::min(x / cb, field.cols - 1));
        out.at(x, y) = chroma_sample64(ref, 8 * x + field.dx[i], 8 * y + field.dy[i]) / 64.0;
      }
    }
  }
  if (!refine || field.is_zero()) return pred;
  FrameF out = pred;
  refine_plane(pred.planes[0], out.planes[0], field, b);
  refine_plane(pred.planes[1], out.planes[1], field, cb);
  refine_plane(pred.planes[2], out.planes[2], field, cb);
  return out;
}

CodedMotion compress_motion(const MotionField& field, int step) {
  if (step < 1 || step > 65535) fail(ErrorKind::argument, "motion quantizer step out of range");
  if (field.block < 1 || field.block > 255) fail(ErrorKind::capacity, "motion block size exceeds 8 bits");
  std::vector<std::int32_t> symbols(field.dx.size() * 2);
  CodedMotion out;
  out.decoded = field;
  for (std::size_t i = 0; i < field.dx.size(); ++i) {
    symbols[2 * i] = entropy::quantize_one(field.dx[i], step);
    symbols[2 * i + 1] = entropy::quantize_one(field.dy[i], step);
    out.decoded.dx[i] = symbols[2 * i] * step;
    out.decoded.dy[i] = symbols[2 * i + 1] * step;
  }
  out.chunk = entropy::encode_region(motion_geometry(field.rows, field.cols),
                                     entropy::ContextMap::full(field.rows, field.cols),
                                     static_cast<std::uint16_t>(step),
                                     static_cast<std::uint8_t>(field.block), symbols);
  return out;
}

MotionField decompress_motion(std::span<const std::uint8_t> chunk, int frame_width, int frame_height) {
  const auto header = entropy::peek_region_header(chunk);
  const int b = header.aux;
  if (b < 2 || b % 2 != 0 || frame_width % b != 0 || frame_height % b != 0) {
    fail(ErrorKind::format, "motion chunk declares an unusable block size " + std::to_string(b));
  }
  MotionField field(frame_height / b, frame_width / b, b);
  const auto decoded = entropy::decode_region(chunk, motion_geometry(field.rows, field.cols),
                                              entropy::ContextMap::full(field.rows, field.cols));
  const int step = decoded.header.step;
  for (std::size_t i = 0; i < field.dx.size(); ++i) {
    field.dx[i] = decoded.symbols[2 * i] * step;
    field.dy[i] = decoded.symbols[2 * i + 1] * step;
  }
  return field;
}

Frame reconstruct(const FrameF& predicted, const FrameF& residual) {
  Frame out(predicted.width(), predicted.height());
  for (int p = 0; p < kPlaneCount; ++p) {
    const auto& a = predicted.planes[p].data;
    const auto& r = residual.planes[p].data;
    auto& o = out.planes[p].data;
    for (std::size_t i = 0; i < o.size(); ++i) {
      o[i] = static_cast<std::uint8_t>(std::clamp(std::round(a[i] + r[i]), 0.0, 255.0));
    }
  }
  return out;
}

CodedResidual compress_residual(const Frame& current, const FrameF& predicted, double step,
                                double rounding) {
  if (current.width() != predicted.width() || current.height() != predicted.height()) {
    fail(ErrorKind::dimension, "residual needs frames of equal size");
  }
  if (!(step >= 1.0 && step <= 65535.0) || step != std::floor(step)) {
    fail(ErrorKind::argument, "residual quantizer step must be an integer in [1, 65535]");
  }
  FrameF residual(current.width(), current.height());
  for (int p = 0; p < kPlaneCount; ++p) {
    for (std::size_t i = 0; i < residual.planes[p].data.size(); ++i) {
      residual.planes[p].data[i] = current.planes[p].data[i] - predicted.planes[p].data[i];
    }
  }
  if (!(rounding > 0.0 && rounding <= 0.5)) fail(ErrorKind::argument, "rounding offset must be in (0, 0.5]");
  const LatentPlane coeff = transform::analysis_residual(residual);
  LatentGrid q(coeff.rows, coeff.cols, coeff.channels);
  for (std::size_t i = 0; i < coeff.values.size(); ++i) {
    const double a = std::min(std::floor(std::abs(coeff.values[i]) / step + rounding),
                              static_cast<double>(entropy::kMaxBound));
    q.values[i] = static_cast<std::int32_t>(coeff.values[i] < 0.0 ? -a : a);
  }
  CodedResidual out;
  out.chunk = entropy::encode_region(transform::latent_geometry(q.rows, q.cols),
                                     entropy::ContextMap::full(q.rows, q.cols),
                                     static_cast<std::uint16_t>(step), 0, q.values);
  out.reconstruction =
      reconstruct(predicted, transform::synthesis_residual(transform::dequantize_latent(q, step)));
  return out;
}

FrameF decompress_residual(std::span<const std::uint8_t> chunk, int frame_width, int frame_height) {
  if (frame_width % transform::kStride != 0 || frame_height % transform::kStride != 0) {
    fail(ErrorKind::dimension, "residual frames must be padded to multiples of 16");
  }
  const int rows = frame_height / transform::kStride;
  const int cols = frame_width / transform::kStride;
  auto decoded = entropy::decode_region(chunk, transform::latent_geometry(rows, cols),
                                        entropy::ContextMap::full(rows, cols));
  LatentGrid q(rows, cols, transform::kChannels);
  q.values = std::move(decoded.symbols);
  return transform::synthesis_residual(transform::dequantize_latent(q, decoded.header.step));
}

}  // namespace ssvc::intercode
