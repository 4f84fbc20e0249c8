#include "mitofuse/types.hpp"

#include <stdexcept>

namespace mitofuse {

void validate(const SlideInfo& slide) {
  if (slide.width < 1 || slide.height < 1) {
    throw std::invalid_argument("slide '" + slide.slide_id + "' has no pixels (" +
                                std::to_string(slide.width) + "x" + std::to_string(slide.height) + ")");
  }
  if (slide.microns_per_pixel && !(*slide.microns_per_pixel > 0.0)) {
    throw std::invalid_argument("slide '" + slide.slide_id + "' has non-positive microns_per_pixel");
  }
}

std::optional<BBox> clip_box(const BBox& b, const SlideInfo& bounds) {
  validate(bounds);
  return intersection(b, bounds.bounds());
}

}  // namespace mitofuse
