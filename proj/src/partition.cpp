#include "ssvc/partition.hpp"

#include <algorithm>
#include <numeric>

#include "ssvc/error.hpp"

namespace ssvc::partition {

namespace {

bool intersects(const CellBox& x, const CellBox& y) {
  return x.col0 < y.col1 && y.col0 < x.col1 && x.row0 < y.row1 && y.row0 < x.row1;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void finish_region(Region& region, int rows, int cols) {
  region.cells.clear();
  region.segments.clear();
  for (int r = 0; r < rows; ++r) {
    int c = 0;
    while (c < cols) {
      if (region.mask[static_cast<std::size_t>(r * cols + c)] == 0) {
        ++c;
        continue;
      }
      const int begin = c;
      while (c < cols && region.mask[static_cast<std::size_t>(r * cols + c)] != 0) {
        region.cells.push_back(r * cols + c);
        ++c;
      }
      region.segments.push_back(Segment{r, begin, c});
    }
  }
}

}  // namespace

RegionLayout build_layout(std::span<const CellBox> boxes, int rows, int cols) {
  if (boxes.size() > 65535) fail(ErrorKind::capacity, "too many objects");
  const auto grid = static_cast<std::size_t>(rows) * cols;
  for (const CellBox& b : boxes) {
    if (b.empty() || b.col0 < 0 || b.row0 < 0 || b.col1 > cols || b.row1 > rows) {
      fail(ErrorKind::argument, "object cell box empty or outside the latent grid");
    }
  }

  std::vector<std::size_t> parent(boxes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (intersects(boxes[i], boxes[j])) {
        parent[find_root(parent, j)] = find_root(parent, i);
      }
    }
  }

  // One region per connected group; ordered by its first cell in scan order.
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (find_root(parent, i) == i) roots.push_back(i);
  }
  std::vector<Region> groups;
  std::vector<std::int32_t> first_cell;
  for (std::size_t root : roots) {
    Region region;
    region.kind = RegionKind::object;
    region.mask.assign(grid, 0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (find_root(parent, i) != root) continue;
      region.objects.push_back(static_cast<std::uint16_t>(i));
      for (int r = boxes[i].row0; r < boxes[i].row1; ++r) {
        for (int c = boxes[i].col0; c < boxes[i].col1; ++c) region.mask[static_cast<std::size_t>(r * cols + c)] = 1;
      }
    }
    finish_region(region, rows, cols);
    first_cell.push_back(region.cells.front());
    groups.push_back(std::move(region));
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return first_cell[x] < first_cell[y]; });

  RegionLayout layout;
  layout.rows = rows;
  layout.cols = cols;
  layout.region_of_object.assign(boxes.size(), 0);
  std::vector<std::uint8_t> covered(grid, 0);
  for (std::size_t idx : order) {
    Region& region = groups[idx];
    for (std::uint16_t obj : region.objects) {
      layout.region_of_object[obj] = static_cast<std::uint16_t>(layout.regions.size());
    }
    for (std::size_t i = 0; i < grid; ++i) covered[i] |= region.mask[i];
    layout.regions.push_back(std::move(region));
  }

  Region background;
  background.kind = RegionKind::background;
  background.mask.resize(grid);
  for (std::size_t i = 0; i < grid; ++i) background.mask[i] = covered[i] ? 0 : 1;
  finish_region(background, rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::uint8_t* row_mask = background.mask.data() + static_cast<std::size_t>(r) * cols;
    const auto first_bg = std::find(row_mask, row_mask + cols, std::uint8_t{1}) - row_mask;
    if (first_bg == cols) continue;  // no background in this row: nothing to fill
    int c = 0;
    while (c < cols) {
      if (row_mask[c] != 0) {
        ++c;
        continue;
      }
      const int begin = c;
      while (c < cols && row_mask[c] == 0) ++c;
      const int source = begin == 0 ? r * cols + static_cast<int>(first_bg) : r * cols + begin - 1;
      for (int h = begin; h < c; ++h) background.fill.push_back(FillEntry{r * cols + h, source});
    }
  }
  layout.regions.push_back(std::move(background));
  return layout;
}

RegionLayout build_layout(std::span<const ObjectRecord> objects, int stride, int rows, int cols) {
  std::vector<CellBox> boxes;
  boxes.reserve(objects.size());
  for (const ObjectRecord& o : objects) boxes.push_back(o.latent(stride, rows, cols));
  return build_layout(boxes, rows, cols);
}

entropy::ContextMap context_map(const RegionLayout& layout, std::size_t region) {
  const Region& r = layout.regions.at(region);
  entropy::ContextMap ctx;
  ctx.rows = layout.rows;
  ctx.cols = layout.cols;
  ctx.coded = r.cells;
  ctx.alias.assign(static_cast<std::size_t>(layout.rows) * layout.cols, -1);
  for (std::int32_t cell : r.cells) ctx.alias[static_cast<std::size_t>(cell)] = cell;
  for (const FillEntry& f : r.fill) ctx.alias[static_cast<std::size_t>(f.cell)] = f.source;
  return ctx;
}

std::vector<std::int32_t> gather_region(const LatentGrid& grid, const Region& region) {
  if (region.mask.size() != static_cast<std::size_t>(grid.cell_count())) {
    fail(ErrorKind::layout, "region does not match the latent grid");
  }
  std::vector<std::int32_t> out;
  out.reserve(region.cells.size() * static_cast<std::size_t>(grid.channels));
  for (std::int32_t cell : region.cells) {
    const std::int32_t* v = grid.cell(cell);
    out.insert(out.end(), v, v + grid.channels);
  }
  return out;
}

void scatter_region(std::span<const std::int32_t> symbols, const Region& region, LatentGrid& grid) {
  const auto channels = static_cast<std::size_t>(grid.channels);
  if (region.mask.size() != static_cast<std::size_t>(grid.cell_count())) {
    fail(ErrorKind::layout, "region does not match the latent grid");
  }
  if (symbols.size() != region.cells.size() * channels) {
    fail(ErrorKind::layout, "region expects " + std::to_string(region.cells.size() * channels) +
                                " symbols, got " + std::to_string(symbols.size()));
  }
  for (std::size_t k = 0; k < region.cells.size(); ++k) {
    std::copy_n(symbols.data() + k * channels, channels, grid.cell(region.cells[k]));
  }
  for (const FillEntry& f : region.fill) {
    std::copy_n(grid.cell(f.source), channels, grid.cell(f.cell));
  }
}

std::vector<RegionBits> region_bit_report(const RegionLayout& layout,
                                          std::span<const std::size_t> chunk_bytes,
                                          int frame_width, int frame_height) {
  if (chunk_bytes.size() != layout.regions.size()) {
    fail(ErrorKind::layout, "one chunk length per region required");
  }
  std::uint64_t total = 0;
  for (std::size_t b : chunk_bytes) total += 8 * static_cast<std::uint64_t>(b);
  const double pixels = static_cast<double>(frame_width) * frame_height;
  std::vector<RegionBits> out;
  for (std::size_t i = 0; i < layout.regions.size(); ++i) {
    RegionBits rb;
    rb.region = i;
    rb.kind = layout.regions[i].kind;
    rb.objects = layout.regions[i].objects;
    rb.bits = 8 * static_cast<std::uint64_t>(chunk_bytes[i]);
    rb.bpp = pixels > 0 ? static_cast<double>(rb.bits) / pixels : 0.0;
    rb.fraction = total > 0 ? static_cast<double>(rb.bits) / static_cast<double>(total) : 0.0;
    out.push_back(std::move(rb));
  }
  return out;
}

}  // namespace ssvc::partition
