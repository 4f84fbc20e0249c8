#include "mitofuse/spatial_grid.hpp"

#include <stdexcept>

namespace mitofuse {

SpatialGrid::SpatialGrid(std::span<const Point2d> points, double cell_size) {
  if (points.empty()) return;
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("spatial grid cell size must be positive and finite");
  }

  Point2d lo = points.front();
  Point2d hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo;

  // Keep the dense cell array proportional to the point count; a coarser
  // grid is still correct because queries scan every overlapped cell.
  const double max_cells = std::max(64.0, 4.0 * static_cast<double>(points.size()));
  cell_ = cell_size;
  for (;;) {
    const Point2d span = (hi - lo) / cell_;
    const double nx = std::floor(span.x()) + 1.0;
    const double ny = std::floor(span.y()) + 1.0;
    if (nx * ny <= max_cells) {
      nx_ = static_cast<std::int64_t>(nx);
      ny_ = static_cast<std::int64_t>(ny);
      break;
    }
    cell_ *= std::max(1.25, std::sqrt(nx * ny / max_cells));
  }

  const auto cell_of = [&](const Point2d& p) {
    const auto cx = std::min<std::int64_t>(static_cast<std::int64_t>((p.x() - origin_.x()) / cell_), nx_ - 1);
    const auto cy = std::min<std::int64_t>(static_cast<std::int64_t>((p.y() - origin_.y()) / cell_), ny_ - 1);
    return static_cast<std::size_t>(cy * nx_ + cx);
  };

  const auto n_cells = static_cast<std::size_t>(nx_ * ny_);
  offsets_.assign(n_cells + 1, 0);
  std::vector<std::size_t> cell_ids(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    cell_ids[i] = cell_of(points[i]);
    ++offsets_[cell_ids[i] + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) offsets_[c + 1] += offsets_[c];
  items_.resize(points.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) items_[cursor[cell_ids[i]]++] = i;
}

}  // namespace mitofuse
