#include "ssvc/semantics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssvc/error.hpp"

namespace ssvc {

namespace {

constexpr std::array<std::string_view, 80> kCocoNames{
    "person",        "bicycle",      "car",           "motorcycle",    "airplane",
    "bus",           "train",        "truck",         "boat",          "traffic light",
    "fire hydrant",  "stop sign",    "parking meter", "bench",         "bird",
    "cat",           "dog",          "horse",         "sheep",         "cow",
    "elephant",      "bear",         "zebra",         "giraffe",       "backpack",
    "umbrella",      "handbag",      "tie",           "suitcase",      "frisbee",
    "skis",          "snowboard",    "sports ball",   "kite",          "baseball bat",
    "baseball glove", "skateboard",  "surfboard",     "tennis racket", "bottle",
    "wine glass",    "cup",          "fork",          "knife",         "spoon",
    "bowl",          "banana",       "apple",         "sandwich",      "orange",
    "broccoli",      "carrot",       "hot dog",       "pizza",         "donut",
    "cake",          "chair",        "couch",         "potted plant",  "bed",
    "dining table",  "toilet",       "tv",            "laptop",        "mouse",
    "remote",        "keyboard",     "cell phone",    "microwave",     "oven",
    "toaster",       "sink",         "refrigerator",  "book",          "clock",
    "vase",          "scissors",     "teddy bear",    "hair drier",    "toothbrush"};

int floor_div(int v, int d) { return v >= 0 ? v / d : -((-v + d - 1) / d); }
int ceil_div(int v, int d) { return v >= 0 ? (v + d - 1) / d : -((-v) / d); }

}  // namespace

CellBox latent_box(const PixelBox& box, int stride, int grid_rows, int grid_cols) {
  CellBox c;
  c.col0 = std::clamp(floor_div(box.a1, stride), 0, grid_cols);
  c.row0 = std::clamp(floor_div(box.b1, stride), 0, grid_rows);
  c.col1 = std::clamp(ceil_div(box.a2, stride), 0, grid_cols);
  c.row1 = std::clamp(ceil_div(box.b2, stride), 0, grid_rows);
  return c;
}

std::string_view class_name(std::uint16_t class_id) {
  return class_id < kCocoNames.size() ? kCocoNames[class_id] : std::string_view{};
}

std::optional<std::uint16_t> class_id_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kCocoNames.size(); ++i) {
    if (kCocoNames[i] == name) return static_cast<std::uint16_t>(i);
  }
  return std::nullopt;
}

}  // namespace ssvc

namespace ssvc::semantics {

std::vector<Peak> extract_peaks(const Heatmap& heatmap, double threshold, int top_k) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    fail(ErrorKind::argument, "peak threshold must lie in (0, 1]");
  }
  std::vector<Peak> out;
  for (int k = 0; k < heatmap.classes; ++k) {
    std::vector<std::pair<Peak, int>> found;  // peak, row-major index
    for (int r = 0; r < heatmap.rows; ++r) {
      for (int c = 0; c < heatmap.cols; ++c) {
        const double v = heatmap.at(r, c, k);
        if (v < threshold) continue;
        const int idx = r * heatmap.cols + c;
        bool is_peak = true;
        for (int dr = -1; dr <= 1 && is_peak; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr;
            const int cc = c + dc;
            if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= heatmap.rows || cc >= heatmap.cols) {
              continue;
            }
            const double n = heatmap.at(rr, cc, k);
            if (n > v || (n == v && rr * heatmap.cols + cc < idx)) {
              is_peak = false;
              break;
            }
          }
        }
        if (is_peak) found.push_back({Peak{c, r, k, v}, idx});
      }
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
      return x.first.score > y.first.score;
    });
    const std::size_t keep = std::min(found.size(), static_cast<std::size_t>(std::max(top_k, 0)));
    for (std::size_t i = 0; i < keep; ++i) out.push_back(found[i].first);
  }
  return out;
}

BoxF assemble_bbox_raw(const Peak& peak, const SizeOffsetMaps& maps, int stride) {
  if (peak.a < 0 || peak.b < 0 || peak.a >= maps.cols || peak.b >= maps.rows) {
    fail(ErrorKind::argument, "peak outside the regression maps");
  }
  const double* s = maps.size_at(peak.b, peak.a);
  const double* o = maps.offset_at(peak.b, peak.a);
  const double ca = peak.a + o[0];
  const double cb = peak.b + o[1];
  return BoxF{stride * (ca - s[0] / 2), stride * (cb - s[1] / 2), stride * (ca + s[0] / 2),
              stride * (cb + s[1] / 2)};
}

std::optional<PixelBox> assemble_bbox(const Peak& peak, const SizeOffsetMaps& maps, int stride,
                                      int frame_width, int frame_height) {
  const BoxF f = assemble_bbox_raw(peak, maps, stride);
  // Outward rounding tolerates representation error in values that are
  // integral up to a few ulps.
  constexpr double kSlack = 1e-9;
  const double a1 = std::clamp(std::floor(f.a1 + kSlack), 0.0, static_cast<double>(frame_width));
  const double b1 = std::clamp(std::floor(f.b1 + kSlack), 0.0, static_cast<double>(frame_height));
  const double a2 = std::clamp(std::ceil(f.a2 - kSlack), 0.0, static_cast<double>(frame_width));
  const double b2 = std::clamp(std::ceil(f.b2 - kSlack), 0.0, static_cast<double>(frame_height));
  if (!(a2 > a1) || !(b2 > b1)) return std::nullopt;
  return PixelBox{static_cast<std::uint16_t>(a1), static_cast<std::uint16_t>(b1),
                  static_cast<std::uint16_t>(a2), static_cast<std::uint16_t>(b2)};
}

CellIndex gt_to_lowres(double pa, double pb, int stride) {
  return CellIndex{static_cast<int>(std::floor(pa / stride)), static_cast<int>(std::floor(pb / stride))};
}

double focal_loss(const Heatmap& predicted, const Heatmap& truth, double alpha, double beta) {
  if (predicted.values.size() != truth.values.size() || predicted.rows != truth.rows ||
      predicted.cols != truth.cols || predicted.classes != truth.classes) {
    fail(ErrorKind::dimension, "heatmaps differ in shape");
  }
  double sum = 0.0;
  std::size_t centres = 0;
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    const double p = std::clamp(predicted.values[i], kFocalEpsilon, 1.0 - kFocalEpsilon);
    const double y = truth.values[i];
    if (y == 1.0) {
      sum += std::pow(1.0 - p, alpha) * std::log(p);
      ++centres;
    } else {
      sum += std::pow(1.0 - y, beta) * std::pow(p, alpha) * std::log(1.0 - p);
    }
  }
  if (centres == 0) fail(ErrorKind::argument, "focal loss needs at least one centre");
  return -sum / static_cast<double>(centres);
}

SizeOffsetLoss size_offset_losses(const SizeOffsetMaps& maps, std::span<const PixelBox> objects,
                                  int stride) {
  if (objects.empty()) fail(ErrorKind::argument, "size/offset losses need at least one object");
  SizeOffsetLoss loss;
  for (const PixelBox& box : objects) {
    const double pa = (box.a1 + box.a2) / 2.0;
    const double pb = (box.b1 + box.b2) / 2.0;
    const CellIndex cell = gt_to_lowres(pa, pb, stride);
    if (cell.a < 0 || cell.b < 0 || cell.a >= maps.cols || cell.b >= maps.rows) {
      fail(ErrorKind::argument, "object centre outside the regression maps");
    }
    const double* s = maps.size_at(cell.b, cell.a);
    const double* o = maps.offset_at(cell.b, cell.a);
    loss.size += std::abs(s[0] - static_cast<double>(box.width()) / stride) +
                 std::abs(s[1] - static_cast<double>(box.height()) / stride);
    loss.offset += std::abs(o[0] - (pa / stride - cell.a)) + std::abs(o[1] - (pb / stride - cell.b));
  }
  const auto n = static_cast<double>(objects.size());
  loss.size /= n;
  loss.offset /= n;
  return loss;
}

double total_parsing_loss(double heatmap_loss, double size_loss, double offset_loss,
                          double lambda_size, double lambda_offset) {
  return heatmap_loss + lambda_size * size_loss + lambda_offset * offset_loss;
}

std::vector<ObjectRecord> AnnotationSet::objects_for(std::uint32_t frame) const {
  const auto it = by_frame.find(frame);
  return it == by_frame.end() ? std::vector<ObjectRecord>{} : it->second;
}

std::size_t AnnotationSet::total() const {
  std::size_t n = 0;
  for (const auto& [frame, objects] : by_frame) n += objects.size();
  return n;
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      if (!current.empty()) fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) fields.push_back(std::move(current));
  return fields;
}

[[noreturn]] void line_error(int line, const std::string& what) {
  fail(ErrorKind::format, "annotations line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& token, int line, const char* field) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
    line_error(line, std::string("bad ") + field + " '" + token + "'");
  }
  return v;
}

}  // namespace

AnnotationSet parse_annotations(std::string_view text, int frame_width, int frame_height) {
  AnnotationSet set;
  int line_no = 0;
  bool first_record = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (first_record && fields[0] == "frame") {
      first_record = false;
      continue;
    }
    first_record = false;

    // Class names may contain spaces ("traffic light"): the four box fields
    // are always the last four tokens.
    if (fields.size() < 6) line_error(line_no, "expected frame, class, x, y, w, h");
    const double frame = parse_number(fields[0], line_no, "frame");
    if (frame < 0 || frame != std::floor(frame) || frame > 4294967295.0) {
      line_error(line_no, "frame index must be a non-negative integer");
    }
    std::string cls = fields[1];
    for (std::size_t i = 2; i + 4 < fields.size(); ++i) cls += " " + fields[i];
    std::uint16_t class_id = 0;
    {
      unsigned v = 0;
      const auto res = std::from_chars(cls.data(), cls.data() + cls.size(), v);
      if (res.ec == std::errc{} && res.ptr == cls.data() + cls.size()) {
        if (v > 65535) line_error(line_no, "class id exceeds 16 bits");
        class_id = static_cast<std::uint16_t>(v);
      } else if (auto id = class_id_from_name(cls)) {
        class_id = *id;
      } else {
        line_error(line_no, "unknown class '" + cls + "'");
      }
    }
    const std::size_t n = fields.size();
    const double x = parse_number(fields[n - 4], line_no, "x");
    const double y = parse_number(fields[n - 3], line_no, "y");
    const double w = parse_number(fields[n - 2], line_no, "w");
    const double h = parse_number(fields[n - 1], line_no, "h");
    if (!(w > 0) || !(h > 0)) line_error(line_no, "box width and height must be positive");

    double a1 = std::floor(x);
    double b1 = std::floor(y);
    double a2 = std::ceil(x + w);
    double b2 = std::ceil(y + h);
    if (a1 < 0 || b1 < 0 || a2 > frame_width || b2 > frame_height) {
      a1 = std::clamp(a1, 0.0, static_cast<double>(frame_width));
      b1 = std::clamp(b1, 0.0, static_cast<double>(frame_height));
      a2 = std::clamp(a2, 0.0, static_cast<double>(frame_width));
      b2 = std::clamp(b2, 0.0, static_cast<double>(frame_height));
      if (!(a2 > a1) || !(b2 > b1)) line_error(line_no, "box lies outside the frame");
      set.warnings.push_back("annotations line " + std::to_string(line_no) +
                             ": box clipped to the frame");
    }
    ObjectRecord rec;
    rec.class_id = class_id;
    rec.bbox = PixelBox{static_cast<std::uint16_t>(a1), static_cast<std::uint16_t>(b1),
                        static_cast<std::uint16_t>(a2), static_cast<std::uint16_t>(b2)};
    set.by_frame[static_cast<std::uint32_t>(frame)].push_back(rec);
  }
  return set;
}

AnnotationSet load_annotations(const std::filesystem::path& path, int frame_width,
                               int frame_height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open annotations file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_annotations(ss.str(), frame_width, frame_height);
}

}  // namespace ssvc::semantics
