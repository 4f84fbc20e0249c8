#ifndef MITOFUSE_TILING_HPP
#define MITOFUSE_TILING_HPP

#include "mitofuse/types.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mitofuse {

inline constexpr std::int64_t kDefaultTileSize = 1024;

struct Tile {
  std::size_t index = 0;
  std::int64_t ox = 0;
  std::int64_t oy = 0;
  std::int64_t width = kDefaultTileSize;
  std::int64_t height = kDefaultTileSize;

  Point2d offset() const { return Point2d(static_cast<double>(ox), static_cast<double>(oy)); }
  BBox local_bounds() const {
    return BBox(0.0, 0.0, static_cast<double>(width), static_cast<double>(height));
  }
  BBox global_bounds() const { return local_bounds().translated(offset()); }
  bool contains_pixel(std::int64_t x, std::int64_t y) const {
    return x >= ox && x < ox + width && y >= oy && y < oy + height;
  }
  bool operator==(const Tile&) const = default;
};

struct TilePlan {
  SlideInfo slide;
  std::int64_t tile_size = kDefaultTileSize;
  std::int64_t overlap = 0;
  std::vector<Tile> tiles;

  // Throws std::out_of_range for an index outside the plan.
  const Tile& tile(std::size_t index) const;
};

// Offsets of one axis: advance by tile_size - overlap; the last tile is
// shifted inward so that it ends on the slide edge.
std::vector<std::int64_t> axis_offsets(std::int64_t extent, std::int64_t tile_size, std::int64_t overlap);

// Row-major tile grid. Slides smaller than a tile get one tile clamped to the slide.
TilePlan plan_tiles(const SlideInfo& slide, std::int64_t tile_size = kDefaultTileSize,
                    std::int64_t overlap = 0);

// Tile-local -> slide-global by adding the tile offset. Throws FrameError when
// the detection is not local to `tile` or its box lies outside the tile.
Detection to_global(const Detection& d, const Tile& tile);

// Inverse of to_global. Throws FrameError when the detection is not global or
// its box misses the tile.
Detection to_local(const Detection& d, const Tile& tile);

}  // namespace mitofuse

#endif  // MITOFUSE_TILING_HPP
