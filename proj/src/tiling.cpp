#include "mitofuse/tiling.hpp"

#include "mitofuse/errors.hpp"

#include <stdexcept>
#include <string>

namespace mitofuse {

const Tile& TilePlan::tile(std::size_t index) const {
  if (index >= tiles.size()) {
    throw std::out_of_range("tile index " + std::to_string(index) + " outside plan of " +
                            std::to_string(tiles.size()) + " tiles for slide '" + slide.slide_id + "'");
  }
  return tiles[index];
}

std::vector<std::int64_t> axis_offsets(std::int64_t extent, std::int64_t tile_size, std::int64_t overlap) {
  if (tile_size < 1) throw std::invalid_argument("tile size must be at least 1");
  if (overlap < 0 || overlap >= tile_size) {
    throw std::invalid_argument("overlap must satisfy 0 <= overlap < tile size");
  }
  if (extent < 1) throw std::invalid_argument("axis extent must be at least 1");

  if (extent <= tile_size) return {0};
  const std::int64_t stride = tile_size - overlap;
  std::vector<std::int64_t> offsets;
  for (std::int64_t off = 0;; off += stride) {
    if (off + tile_size >= extent) {
      offsets.push_back(extent - tile_size);
      break;
    }
    offsets.push_back(off);
  }
  return offsets;
}

TilePlan plan_tiles(const SlideInfo& slide, std::int64_t tile_size, std::int64_t overlap) {
  validate(slide);
  const auto xs = axis_offsets(slide.width, tile_size, overlap);
  const auto ys = axis_offsets(slide.height, tile_size, overlap);

  TilePlan plan{slide, tile_size, overlap, {}};
  plan.tiles.reserve(xs.size() * ys.size());
  const std::int64_t w = std::min(tile_size, slide.width);
  const std::int64_t h = std::min(tile_size, slide.height);
  for (const auto oy : ys) {
    for (const auto ox : xs) plan.tiles.push_back(Tile{plan.tiles.size(), ox, oy, w, h});
  }
  return plan;
}

Detection to_global(const Detection& d, const Tile& tile) {
  const auto* local = std::get_if<TileLocal>(&d.frame);
  if (local == nullptr) throw FrameError("to_global: detection is already in the slide frame");
  if (local->tile_index != tile.index) {
    throw FrameError("to_global: detection belongs to tile " + std::to_string(local->tile_index) +
                     ", not tile " + std::to_string(tile.index));
  }
  if (intersection_area(d.bbox, tile.local_bounds()) <= 0.0) {
    throw FrameError("to_global: box lies outside tile " + std::to_string(tile.index));
  }
  Detection out = d;
  out.bbox = d.bbox.translated(tile.offset());
  out.frame = SlideGlobal{};
  return out;
}

Detection to_local(const Detection& d, const Tile& tile) {
  if (!is_global(d.frame)) throw FrameError("to_local: detection is not in the slide frame");
  if (intersection_area(d.bbox, tile.global_bounds()) <= 0.0) {
    throw FrameError("to_local: box does not intersect tile " + std::to_string(tile.index));
  }
  Detection out = d;
  out.bbox = d.bbox.translated(-tile.offset());
  out.frame = TileLocal{tile.index};
  return out;
}

}  // namespace mitofuse
