#pragma once

// Reorganisation of the i-frame latent grid into coding regions: one region
// per group of overlapping objects (the union of their cells), followed by
// the background. Every cell is coded in exactly one region. Object cells
// interrupting a background row are not coded again by the background; they
// are filled from the nearest background cell on their left (the row's first
// background cell when the hole touches the left edge), which keeps each
// background row a contiguous causal context.

#include <cstdint>
#include <span>
#include <vector>

#include "ssvc/entropy/plane_coder.hpp"
#include "ssvc/frame.hpp"
#include "ssvc/objects.hpp"

namespace ssvc::partition {

enum class RegionKind : std::uint8_t { object, background };

// Maximal run of member cells within one row: columns [col_begin, col_end).
struct Segment {
  int row = 0;
  int col_begin = 0;
  int col_end = 0;
  bool operator==(const Segment&) const = default;
};

struct FillEntry {
  std::int32_t cell = 0;
  std::int32_t source = 0;
  bool operator==(const FillEntry&) const = default;
};

struct Region {
  RegionKind kind = RegionKind::background;
  std::vector<std::uint16_t> objects;  // member object indices, ascending
  std::vector<std::uint8_t> mask;      // rows * cols, 1 on coded cells
  std::vector<std::int32_t> cells;     // coded cells, row-major
  std::vector<Segment> segments;
  std::vector<FillEntry> fill;         // background only, ascending by cell
};

struct RegionLayout {
  int rows = 0;
  int cols = 0;
  std::vector<Region> regions;                // object regions, then background
  std::vector<std::uint16_t> region_of_object;

  std::size_t object_region_count() const { return regions.size() - 1; }
  const Region& background() const { return regions.back(); }
};

// Boxes must be non-empty and inside the grid.
RegionLayout build_layout(std::span<const CellBox> boxes, int rows, int cols);
RegionLayout build_layout(std::span<const ObjectRecord> objects, int stride, int rows, int cols);

// Causal-context description of one region for the plane coder.
entropy::ContextMap context_map(const RegionLayout& layout, std::size_t region);

// Channel vectors of the region's coded cells, in scan-segment order.
std::vector<std::int32_t> gather_region(const LatentGrid& grid, const Region& region);

// Inverse of gather_region. For the background, filled cells then receive a
// copy of their source cell. Throws Error{layout} on a symbol count mismatch.
void scatter_region(std::span<const std::int32_t> symbols, const Region& region, LatentGrid& grid);

struct RegionBits {
  std::size_t region = 0;
  RegionKind kind = RegionKind::background;
  std::vector<std::uint16_t> objects;
  std::uint64_t bits = 0;
  double bpp = 0.0;       // region bits over the frame's pixel count
  double fraction = 0.0;  // share of the i-frame payload
};

// chunk_bytes[i] is the stored size of region i's chunk.
std::vector<RegionBits> region_bit_report(const RegionLayout& layout,
                                          std::span<const std::size_t> chunk_bytes,
                                          int frame_width, int frame_height);

}  // namespace ssvc::partition
