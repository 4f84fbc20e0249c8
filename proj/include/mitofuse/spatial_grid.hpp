#ifndef MITOFUSE_SPATIAL_GRID_HPP
#define MITOFUSE_SPATIAL_GRID_HPP

#include "mitofuse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mitofuse {

// Uniform bucket grid over a fixed point set, stored in CSR form. Used to
// answer "which points lie within `reach` of p (per axis)" without scanning
// the full set. Visitation order inside a query is unspecified.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const Point2d> points, double cell_size);

  double cell_size() const { return cell_; }
  std::int64_t cols() const { return nx_; }
  std::int64_t rows() const { return ny_; }

  // Calls f(index) for every point whose cell overlaps the square of
  // half-width `reach` around p. A superset of the points within reach.
  template <typename F>
  void for_each_near(const Point2d& p, double reach, F&& f) const {
    if (offsets_.size() <= 1) return;
    const std::int64_t cx0 = clamp_col(std::floor((p.x() - reach - origin_.x()) / cell_));
    const std::int64_t cx1 = clamp_col(std::floor((p.x() + reach - origin_.x()) / cell_));
    const std::int64_t cy0 = clamp_row(std::floor((p.y() - reach - origin_.y()) / cell_));
    const std::int64_t cy1 = clamp_row(std::floor((p.y() + reach - origin_.y()) / cell_));
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
      for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        const auto cell = static_cast<std::size_t>(cy * nx_ + cx);
        for (std::size_t k = offsets_[cell]; k < offsets_[cell + 1]; ++k) f(items_[k]);
      }
    }
  }

 private:
  std::int64_t clamp_col(double c) const {
    return static_cast<std::int64_t>(std::clamp(c, 0.0, static_cast<double>(nx_ - 1)));
  }
  std::int64_t clamp_row(double c) const {
    return static_cast<std::int64_t>(std::clamp(c, 0.0, static_cast<double>(ny_ - 1)));
  }

  Point2d origin_ = Point2d::Zero();
  double cell_ = 1.0;
  std::int64_t nx_ = 1;
  std::int64_t ny_ = 1;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> items_;
};

}  // namespace mitofuse

#endif  // MITOFUSE_SPATIAL_GRID_HPP
