#pragma once

// Object parsing: heatmap peak extraction and box assembly, the training
// losses of the keypoint detector as pure functions, and the annotation
// sidecar reader that supplies objects in practice.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssvc/objects.hpp"

namespace ssvc::semantics {

inline constexpr int kDefaultDetectorStride = 4;
inline constexpr double kFocalEpsilon = 1e-7;

// Center heatmap, (row, col, class) layout, values in [0, 1].
struct Heatmap {
  int rows = 0;
  int cols = 0;
  int classes = 0;
  std::vector<double> values;

  Heatmap() = default;
  Heatmap(int r, int c, int k, double fill = 0.0)
      : rows(r), cols(c), classes(k), values(static_cast<std::size_t>(r) * c * k, fill) {}

  double& at(int row, int col, int cls) {
    return values[(static_cast<std::size_t>(row) * cols + col) * classes + cls];
  }
  double at(int row, int col, int cls) const {
    return values[(static_cast<std::size_t>(row) * cols + col) * classes + cls];
  }
};

// Size (w, h) and sub-cell offset (da, db) regression maps, in detector cells.
struct SizeOffsetMaps {
  int rows = 0;
  int cols = 0;
  std::vector<double> size;    // (row, col, 2)
  std::vector<double> offset;  // (row, col, 2)

  SizeOffsetMaps() = default;
  SizeOffsetMaps(int r, int c)
      : rows(r),
        cols(c),
        size(static_cast<std::size_t>(r) * c * 2, 0.0),
        offset(static_cast<std::size_t>(r) * c * 2, 0.0) {}

  double* size_at(int row, int col) { return &size[(static_cast<std::size_t>(row) * cols + col) * 2]; }
  const double* size_at(int row, int col) const {
    return &size[(static_cast<std::size_t>(row) * cols + col) * 2];
  }
  double* offset_at(int row, int col) { return &offset[(static_cast<std::size_t>(row) * cols + col) * 2]; }
  const double* offset_at(int row, int col) const {
    return &offset[(static_cast<std::size_t>(row) * cols + col) * 2];
  }
};

struct Peak {
  int a = 0;  // column
  int b = 0;  // row
  int class_id = 0;
  double score = 0.0;

  bool operator==(const Peak&) const = default;
};

// A cell is a peak when it is the maximum of its 3x3 neighbourhood within its
// class (equal values: the smaller row-major index wins) and its score is at
// least `threshold`. At most top_k per class, by descending score; classes in
// ascending order.
std::vector<Peak> extract_peaks(const Heatmap& heatmap, double threshold, int top_k);

struct BoxF {
  double a1 = 0, b1 = 0, a2 = 0, b2 = 0;
};

// stride * (a + da -/+ w/2, b + db -/+ h/2), before clipping and rounding.
BoxF assemble_bbox_raw(const Peak& peak, const SizeOffsetMaps& maps, int stride);

// Clipped to the frame and rounded outward. std::nullopt for degenerate
// boxes (non-positive width or height), which callers drop with a warning.
std::optional<PixelBox> assemble_bbox(const Peak& peak, const SizeOffsetMaps& maps, int stride,
                                      int frame_width, int frame_height);

struct CellIndex {
  int a = 0;
  int b = 0;
  bool operator==(const CellIndex&) const = default;
};

// floor(p / stride) per coordinate.
CellIndex gt_to_lowres(double pa, double pb, int stride);

// Penalty-reduced pixel-wise focal loss. Predictions are clamped to
// [eps, 1 - eps]; cells with gt exactly 1 are the centres. Throws
// Error{argument} when the ground truth has no centre.
double focal_loss(const Heatmap& predicted, const Heatmap& truth, double alpha, double beta);

struct SizeOffsetLoss {
  double size = 0.0;
  double offset = 0.0;
};

// L1 losses at each object's low-resolution centre. Sizes are compared in
// detector cells: s_k = (a2 - a1, b2 - b1) / stride.
SizeOffsetLoss size_offset_losses(const SizeOffsetMaps& maps, std::span<const PixelBox> objects,
                                  int stride);

double total_parsing_loss(double heatmap_loss, double size_loss, double offset_loss,
                          double lambda_size, double lambda_offset);

// Annotation sidecar. One record per line:
//   frame, class, x, y, w, h
// separated by commas and/or whitespace; `class` is a numeric id or a COCO
// name; (x, y, w, h) is a pixel box with top-left corner (x, y). Blank lines,
// lines starting with '#', and a leading header line starting with "frame"
// are ignored.
struct AnnotationSet {
  std::map<std::uint32_t, std::vector<ObjectRecord>> by_frame;
  std::vector<std::string> warnings;

  std::vector<ObjectRecord> objects_for(std::uint32_t frame) const;
  std::size_t total() const;
};

// Throws Error{format} naming the offending line for malformed or invalid
// records; boxes crossing the frame border are clipped with a warning.
AnnotationSet parse_annotations(std::string_view text, int frame_width, int frame_height);
AnnotationSet load_annotations(const std::filesystem::path& path, int frame_width,
                               int frame_height);

}  // namespace ssvc::semantics
