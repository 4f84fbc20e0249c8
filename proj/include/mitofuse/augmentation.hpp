#ifndef MITOFUSE_AUGMENTATION_HPP
#define MITOFUSE_AUGMENTATION_HPP

#include "mitofuse/geometry.hpp"
#include "mitofuse/random.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mitofuse {

using Channel = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Plane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB raster stored as three row-major planes (height x width).
class Patch {
 public:
  Patch(Eigen::Index width, Eigen::Index height, Rgb fill = {0, 0, 0});

  // `data` is row-major H x W x 3.
  static Patch from_interleaved(Eigen::Index width, Eigen::Index height, std::span<const std::uint8_t> data);
  std::vector<std::uint8_t> interleaved() const;

  Eigen::Index width() const { return channels_[0].cols(); }
  Eigen::Index height() const { return channels_[0].rows(); }

  Channel& channel(int c) { return channels_[static_cast<std::size_t>(c)]; }
  const Channel& channel(int c) const { return channels_[static_cast<std::size_t>(c)]; }

  Rgb pixel(Eigen::Index x, Eigen::Index y) const {
    return {channels_[0](y, x), channels_[1](y, x), channels_[2](y, x)};
  }
  void set_pixel(Eigen::Index x, Eigen::Index y, const Rgb& v) {
    for (int c = 0; c < 3; ++c) channels_[static_cast<std::size_t>(c)](y, x) = v[static_cast<std::size_t>(c)];
  }

  BBox bounds() const {
    return BBox(0.0, 0.0, static_cast<double>(width()), static_cast<double>(height()));
  }

  bool operator==(const Patch& o) const;

 private:
  std::array<Channel, 3> channels_;
};

struct LabeledPatch {
  Patch patch;
  std::vector<BBox> boxes;  // patch-local coordinates
};

// Integer pixel rectangle [x, x+width) x [y, y+height).
struct PixelRect {
  Eigen::Index x = 0;
  Eigen::Index y = 0;
  Eigen::Index width = 0;
  Eigen::Index height = 0;

  BBox box() const {
    return BBox(static_cast<double>(x), static_cast<double>(y), static_cast<double>(x + width),
                static_cast<double>(y + height));
  }
  bool operator==(const PixelRect&) const = default;
};

// Round half to even, then clamp to [0, 255].
std::uint8_t quantize(double v);

// Hexcone HSV with hue in degrees [0, 360) and s, v in [0, 1]; RGB in [0, 1].
//   v = max(r,g,b), c = v - min(r,g,b), s = c / v (0 when v = 0)
//   h = 60 * ((g-b)/c mod 6 | (b-r)/c + 2 | (r-g)/c + 4) for max = r | g | b, 0 when c = 0
// Inverse: c = v*s, x = c*(1 - |(h/60) mod 2 - 1|), m = v - c, sector floor(h/60)
// selects (c,x,0) (x,c,0) (0,c,x) (0,x,c) (x,0,c) (c,0,x), then add m.
Eigen::Vector3d rgb_to_hsv(const Eigen::Vector3d& rgb);
Eigen::Vector3d hsv_to_rgb(const Eigen::Vector3d& hsv);

// hue += dh (mod 360), sat *= ds, val *= dv (both clamped to [0, 1]).
Patch hsv_shift(const Patch& p, double dh, double ds, double dv);

// Normalized taps of radius ceil(3 sigma).
Eigen::VectorXd gaussian_kernel(double sigma);

// Separable Gaussian blur, clamp-to-edge borders, single final quantization.
Patch gaussian_blur(const Patch& p, double sigma);

// Unsharp mask: p + amount * (p - gaussian_blur(p, sigma)), quantized.
Patch sharpen(const Patch& p, double amount, double sigma);

// Adds independent N(0, sigma^2) noise to every channel value.
Patch gaussian_noise(const Patch& p, double sigma, const AugSeed& seed);

inline constexpr std::uint8_t kMosaicFill = 114;
inline constexpr double kMosaicMinBoxFraction = 0.25;

// Four-quadrant composite on an out_size x out_size canvas. The split point is
// drawn uniformly from the central half of the canvas. Input 0..3 fill the
// top-left, top-right, bottom-left and bottom-right quadrants, each anchored
// at its corner touching the split point. Boxes keeping less than 25% of
// their area after cropping are dropped.
LabeledPatch mosaic(const std::array<LabeledPatch, 4>& inputs, Eigen::Index out_size, const AugSeed& seed);

// Same layout with a fixed split point (cx, cy).
LabeledPatch mosaic_at(const std::array<LabeledPatch, 4>& inputs, Eigen::Index out_size, Eigen::Index cx,
                       Eigen::Index cy);

inline constexpr int kCutmixMaxResamples = 16;

// Rectangle with area fraction in [0.1, 0.4] of the target, aspect in
// [0.5, 2] and uniform position; resampled while it does not fit the source.
// Throws std::runtime_error after kCutmixMaxResamples failed resamples.
PixelRect sample_cutmix_rect(const Patch& target, const Patch& source, const AugSeed& seed);

// Pastes source pixels of `rect` into the target. Box ownership follows box
// centers: target boxes centered in `rect` are removed, source boxes centered
// in `rect` are moved over clipped to it, all other target boxes stay.
LabeledPatch cutmix_rect(const LabeledPatch& target, const LabeledPatch& source, const PixelRect& rect);

LabeledPatch cutmix(const LabeledPatch& target, const LabeledPatch& source, const AugSeed& seed);

}  // namespace mitofuse

#endif  // MITOFUSE_AUGMENTATION_HPP
