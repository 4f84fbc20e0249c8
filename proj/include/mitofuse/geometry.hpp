#ifndef MITOFUSE_GEOMETRY_HPP
#define MITOFUSE_GEOMETRY_HPP

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace mitofuse {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2d = Point2<double>;

// Axis-aligned box in pixel space, half-open: [x1, x2) x [y1, y2).
// Construction rejects non-finite coordinates and empty boxes.
template <typename Scalar>
class Box {
 public:
  using Vec = Point2<Scalar>;

  Box(Scalar x1, Scalar y1, Scalar x2, Scalar y2) : min_(x1, y1), max_(x2, y2) {
    if (!valid(x1, y1, x2, y2)) {
      throw std::invalid_argument("degenerate or non-finite box [" + std::to_string(x1) + ", " +
                                  std::to_string(y1) + ", " + std::to_string(x2) + ", " +
                                  std::to_string(y2) + ")");
    }
  }

  Box(const Vec& lo, const Vec& hi) : Box(lo.x(), lo.y(), hi.x(), hi.y()) {}

  static bool valid(Scalar x1, Scalar y1, Scalar x2, Scalar y2) {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
           x1 < x2 && y1 < y2;
  }

  // Returns nothing instead of throwing when the corners do not span a box.
  static std::optional<Box> try_make(Scalar x1, Scalar y1, Scalar x2, Scalar y2) {
    if (!valid(x1, y1, x2, y2)) return std::nullopt;
    return Box(x1, y1, x2, y2);
  }

  static Box centered(const Vec& center, Scalar width, Scalar height) {
    return Box(center.x() - width / 2, center.y() - height / 2, center.x() + width / 2,
               center.y() + height / 2);
  }

  Scalar x1() const { return min_.x(); }
  Scalar y1() const { return min_.y(); }
  Scalar x2() const { return max_.x(); }
  Scalar y2() const { return max_.y(); }

  const Vec& min() const { return min_; }
  const Vec& max() const { return max_; }

  Vec sizes() const { return max_ - min_; }
  Scalar width() const { return max_.x() - min_.x(); }
  Scalar height() const { return max_.y() - min_.y(); }
  Scalar area() const { return width() * height(); }
  Vec center() const { return (min_ + max_) / Scalar(2); }

  Box translated(const Vec& offset) const { return Box(min_ + offset, max_ + offset); }

  bool contains(const Vec& p) const {
    return p.x() >= min_.x() && p.x() < max_.x() && p.y() >= min_.y() && p.y() < max_.y();
  }

  bool contains(const Box& other) const {
    return (other.min_.array() >= min_.array()).all() && (other.max_.array() <= max_.array()).all();
  }

  bool operator==(const Box& o) const { return min_ == o.min_ && max_ == o.max_; }

 private:
  Vec min_;
  Vec max_;
};

using BBox = Box<double>;

template <typename Scalar>
Scalar intersection_area(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Point2<Scalar> extent = (a.max().cwiseMin(b.max()) - a.min().cwiseMax(b.min())).cwiseMax(Scalar(0));
  return extent.prod();
}

template <typename Scalar>
std::optional<Box<Scalar>> intersection(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Point2<Scalar> lo = a.min().cwiseMax(b.min());
  const Point2<Scalar> hi = a.max().cwiseMin(b.max());
  return Box<Scalar>::try_make(lo.x(), lo.y(), hi.x(), hi.y());
}

template <typename Scalar>
Scalar iou(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Scalar inter = intersection_area(a, b);
  if (inter <= Scalar(0)) return Scalar(0);
  const Scalar uni = a.area() + b.area() - inter;
  return inter / uni;
}

template <typename Scalar>
Scalar center_distance(const Box<Scalar>& a, const Box<Scalar>& b) {
  return (a.center() - b.center()).norm();
}

}  // namespace mitofuse

#endif  // MITOFUSE_GEOMETRY_HPP
