#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ssvc {

// Pixel rectangle [a1, a2) x [b1, b2): a is the horizontal axis.
struct PixelBox {
  std::uint16_t a1 = 0;
  std::uint16_t b1 = 0;
  std::uint16_t a2 = 0;
  std::uint16_t b2 = 0;

  int width() const { return a2 - a1; }
  int height() const { return b2 - b1; }
  bool operator==(const PixelBox&) const = default;
};

// Latent-cell rectangle [col0, col1) x [row0, row1).
struct CellBox {
  int col0 = 0;
  int row0 = 0;
  int col1 = 0;
  int row1 = 0;

  bool empty() const { return col1 <= col0 || row1 <= row0; }
  bool contains(int row, int col) const {
    return row >= row0 && row < row1 && col >= col0 && col < col1;
  }
  bool operator==(const CellBox&) const = default;
};

// Expand rule: floor on the near edge, ceil on the far edge, clipped to the
// grid, so the cell rectangle covers every pixel of the box.
CellBox latent_box(const PixelBox& box, int stride, int grid_rows, int grid_cols);

struct ObjectRecord {
  std::uint16_t class_id = 0;
  PixelBox bbox;
  // Index of the coding region (object chunk) that carries this object.
  // Overlapping objects share one region.
  std::uint16_t region = 0;

  CellBox latent(int stride, int grid_rows, int grid_cols) const {
    return latent_box(bbox, stride, grid_rows, grid_cols);
  }
  bool operator==(const ObjectRecord&) const = default;
};

// COCO-80 category names, indexed by class id.
std::string_view class_name(std::uint16_t class_id);
std::optional<std::uint16_t> class_id_from_name(std::string_view name);

}  // namespace ssvc
