#ifndef MITOFUSE_TYPES_HPP
#define MITOFUSE_TYPES_HPP

#include "mitofuse/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mitofuse {

struct TileLocal {
  std::size_t tile_index = 0;
  bool operator==(const TileLocal&) const = default;
};

struct SlideGlobal {
  bool operator==(const SlideGlobal&) const = default;
};

using Frame = std::variant<TileLocal, SlideGlobal>;

inline bool is_global(const Frame& f) { return std::holds_alternative<SlideGlobal>(f); }

// A single model prediction. `score` must lie in [0, 1]; fusion and evaluation
// only accept SlideGlobal detections.
struct Detection {
  BBox bbox;
  double score = 0.0;
  std::string model_id;
  std::string slide_id;
  Frame frame = SlideGlobal{};

  bool operator==(const Detection&) const = default;
};

inline bool valid_score(double s) { return s >= 0.0 && s <= 1.0; }

struct SlideInfo {
  std::string slide_id;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::optional<double> microns_per_pixel;

  BBox bounds() const {
    return BBox(0.0, 0.0, static_cast<double>(width), static_cast<double>(height));
  }
  bool operator==(const SlideInfo&) const = default;
};

// Throws std::invalid_argument when the slide has no pixels.
void validate(const SlideInfo& slide);

// Ground-truth mitoses of one slide. All share one uniform box edge length.
struct AnnotationSet {
  std::string slide_id;
  double box_size = 0.0;
  std::vector<Point2d> centers;

  std::size_t size() const { return centers.size(); }
  bool empty() const { return centers.empty(); }
  BBox box(std::size_t i) const { return BBox::centered(centers[i], box_size, box_size); }
};

// Intersection of `b` with [0, width) x [0, height), or nothing when they are disjoint.
std::optional<BBox> clip_box(const BBox& b, const SlideInfo& bounds);

}  // namespace mitofuse

#endif  // MITOFUSE_TYPES_HPP
