#include "mitofuse/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace mitofuse {

Patch::Patch(Eigen::Index width, Eigen::Index height, Rgb fill) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("patch must be at least 1x1, got " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  for (int c = 0; c < 3; ++c) {
    channel(c) = Channel::Constant(height, width, fill[static_cast<std::size_t>(c)]);
  }
}

Patch Patch::from_interleaved(Eigen::Index width, Eigen::Index height, std::span<const std::uint8_t> data) {
  Patch p(width, height);
  if (data.size() != static_cast<std::size_t>(width * height * 3)) {
    throw std::invalid_argument("interleaved buffer size does not match patch dimensions");
  }
  using Interleaved = Eigen::Map<const Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>,
                                 0, Eigen::Stride<Eigen::Dynamic, 3>>;
  for (int c = 0; c < 3; ++c) {
    p.channel(c) = Interleaved(data.data() + c, height, width, Eigen::Stride<Eigen::Dynamic, 3>(width * 3, 3));
  }
  return p;
}

std::vector<std::uint8_t> Patch::interleaved() const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width() * height() * 3));
  using Interleaved =
      Eigen::Map<Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>, 0,
                 Eigen::Stride<Eigen::Dynamic, 3>>;
  for (int c = 0; c < 3; ++c) {
    Interleaved(out.data() + c, height(), width(), Eigen::Stride<Eigen::Dynamic, 3>(width() * 3, 3)) = channel(c);
  }
  return out;
}

bool Patch::operator==(const Patch& o) const {
  if (width() != o.width() || height() != o.height()) return false;
  for (int c = 0; c < 3; ++c) {
    if ((channel(c) != o.channel(c)).any()) return false;
  }
  return true;
}

std::uint8_t quantize(double v) {
  // nearbyint honors the default FE_TONEAREST mode: ties go to even.
  return static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0, 255.0));
}

namespace {

Plane to_plane(const Channel& c) { return c.cast<double>(); }

Channel from_plane(const Plane& p) { return p.unaryExpr([](double v) { return quantize(v); }); }

template <typename F>
Patch map_planes(const Patch& p, F&& f) {
  Patch out(p.width(), p.height());
  for (int c = 0; c < 3; ++c) out.channel(c) = from_plane(f(to_plane(p.channel(c)), c));
  return out;
}

Plane blur_rows(const Plane& in, const Eigen::VectorXd& taps) {
  const Eigen::Index r = (taps.size() - 1) / 2;
  const Eigen::Index w = in.cols();
  Plane padded(in.rows(), w + 2 * r);
  padded.middleCols(r, w) = in;
  for (Eigen::Index k = 0; k < r; ++k) {
    padded.col(k) = in.col(0);
    padded.col(r + w + k) = in.col(w - 1);
  }
  Plane out = Plane::Zero(in.rows(), w);
  for (Eigen::Index k = 0; k < taps.size(); ++k) out += taps[k] * padded.middleCols(k, w);
  return out;
}

Plane blur_plane(const Plane& in, const Eigen::VectorXd& taps) {
  const Plane rows = blur_rows(in, taps);
  return blur_rows(rows.transpose(), taps).transpose();
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("blur sigma must be positive");
}

}  // namespace

Eigen::Vector3d rgb_to_hsv(const Eigen::Vector3d& rgb) {
  const double r = rgb[0];
  const double g = rgb[1];
  const double b = rgb[2];
  const double v = rgb.maxCoeff();
  const double c = v - rgb.minCoeff();
  const double s = v > 0.0 ? c / v : 0.0;
  double h = 0.0;
  if (c > 0.0) {
    if (v == r) {
      h = 60.0 * std::fmod((g - b) / c, 6.0);
    } else if (v == g) {
      h = 60.0 * ((b - r) / c + 2.0);
    } else {
      h = 60.0 * ((r - g) / c + 4.0);
    }
    if (h < 0.0) h += 360.0;
  }
  return {h, s, v};
}

Eigen::Vector3d hsv_to_rgb(const Eigen::Vector3d& hsv) {
  const double h = hsv[0];
  const double c = hsv[2] * hsv[1];
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  const double m = hsv[2] - c;
  Eigen::Vector3d rgb;
  switch (static_cast<int>(std::floor(hp)) % 6) {
    case 0: rgb << c, x, 0; break;
    case 1: rgb << x, c, 0; break;
    case 2: rgb << 0, c, x; break;
    case 3: rgb << 0, x, c; break;
    case 4: rgb << x, 0, c; break;
    default: rgb << c, 0, x; break;
  }
  return rgb.array() + m;
}

Patch hsv_shift(const Patch& p, double dh, double ds, double dv) {
  if (!(dh >= -180.0 && dh <= 180.0)) throw std::invalid_argument("hue shift must lie in [-180, 180] degrees");
  if (!(ds >= 0.0) || !(dv >= 0.0)) throw std::invalid_argument("saturation and value scales must be >= 0");

  Patch out(p.width(), p.height());
  for (Eigen::Index y = 0; y < p.height(); ++y) {
    for (Eigen::Index x = 0; x < p.width(); ++x) {
      const Rgb px = p.pixel(x, y);
      Eigen::Vector3d hsv = rgb_to_hsv(Eigen::Vector3d(px[0], px[1], px[2]) / 255.0);
      double hue = std::fmod(hsv[0] + dh, 360.0);
      if (hue < 0.0) hue += 360.0;
      if (hue >= 360.0) hue = 0.0;
      hsv[0] = hue;
      hsv[1] = std::clamp(hsv[1] * ds, 0.0, 1.0);
      hsv[2] = std::clamp(hsv[2] * dv, 0.0, 1.0);
      const Eigen::Vector3d rgb = hsv_to_rgb(hsv) * 255.0;
      out.set_pixel(x, y, {quantize(rgb[0]), quantize(rgb[1]), quantize(rgb[2])});
    }
  }
  return out;
}

Eigen::VectorXd gaussian_kernel(double sigma) {
  check_sigma(sigma);
  const auto r = static_cast<Eigen::Index>(std::ceil(3.0 * sigma));
  Eigen::VectorXd taps(2 * r + 1);
  for (Eigen::Index i = -r; i <= r; ++i) {
    taps[i + r] = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
  }
  return taps / taps.sum();
}

Patch gaussian_blur(const Patch& p, double sigma) {
  const Eigen::VectorXd taps = gaussian_kernel(sigma);
  return map_planes(p, [&](const Plane& plane, int) { return blur_plane(plane, taps); });
}

Patch sharpen(const Patch& p, double amount, double sigma) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) throw std::invalid_argument("sharpen amount must be >= 0");
  const Patch blurred = gaussian_blur(p, sigma);
  return map_planes(p, [&](const Plane& plane, int c) {
    return Plane(plane + amount * (plane - to_plane(blurred.channel(c))));
  });
}

Patch gaussian_noise(const Patch& p, double sigma, const AugSeed& seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("noise sigma must be >= 0");
  if (sigma == 0.0) return p;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  // Draw order: row-major pixels, channels interleaved.
  std::array<Plane, 3> planes{to_plane(p.channel(0)), to_plane(p.channel(1)), to_plane(p.channel(2))};
  for (Eigen::Index y = 0; y < p.height(); ++y) {
    for (Eigen::Index x = 0; x < p.width(); ++x) {
      for (auto& plane : planes) plane(y, x) += normal(rng);
    }
  }
  Patch out(p.width(), p.height());
  for (int c = 0; c < 3; ++c) out.channel(c) = from_plane(planes[static_cast<std::size_t>(c)]);
  return out;
}

LabeledPatch mosaic_at(const std::array<LabeledPatch, 4>& inputs, Eigen::Index out_size, Eigen::Index cx,
                       Eigen::Index cy) {
  if (out_size < 2) throw std::invalid_argument("mosaic output size must be at least 2");
  if (cx < 0 || cx > out_size || cy < 0 || cy > out_size) {
    throw std::invalid_argument("mosaic split point outside the canvas");
  }

  LabeledPatch out{Patch(out_size, out_size, {kMosaicFill, kMosaicFill, kMosaicFill}), {}};
  for (std::size_t q = 0; q < 4; ++q) {
    const Patch& in = inputs[q].patch;
    const bool right = q % 2 == 1;
    const bool bottom = q >= 2;

    const Eigen::Index qx0 = right ? cx : 0;
    const Eigen::Index qx1 = right ? out_size : cx;
    const Eigen::Index qy0 = bottom ? cy : 0;
    const Eigen::Index qy1 = bottom ? out_size : cy;
    const Eigen::Index ox = right ? cx : cx - in.width();
    const Eigen::Index oy = bottom ? cy : cy - in.height();

    const Eigen::Index vx0 = std::max(qx0, ox);
    const Eigen::Index vx1 = std::min(qx1, ox + in.width());
    const Eigen::Index vy0 = std::max(qy0, oy);
    const Eigen::Index vy1 = std::min(qy1, oy + in.height());
    if (vx0 >= vx1 || vy0 >= vy1) continue;

    const Eigen::Index vw = vx1 - vx0;
    const Eigen::Index vh = vy1 - vy0;
    for (int c = 0; c < 3; ++c) {
      out.patch.channel(c).block(vy0, vx0, vh, vw) = in.channel(c).block(vy0 - oy, vx0 - ox, vh, vw);
    }

    const BBox visible = PixelRect{vx0, vy0, vw, vh}.box();
    const Point2d offset(static_cast<double>(ox), static_cast<double>(oy));
    for (const auto& b : inputs[q].boxes) {
      const BBox moved = b.translated(offset);
      const auto clipped = intersection(moved, visible);
      if (clipped && clipped->area() >= kMosaicMinBoxFraction * moved.area()) out.boxes.push_back(*clipped);
    }
  }
  return out;
}

LabeledPatch mosaic(const std::array<LabeledPatch, 4>& inputs, Eigen::Index out_size, const AugSeed& seed) {
  if (out_size < 2) throw std::invalid_argument("mosaic output size must be at least 2");
  Rng rng = make_rng(seed);
  const Eigen::Index lo = out_size / 4;
  const Eigen::Index span = std::max<Eigen::Index>(1, out_size - 2 * lo);
  const auto draw = [&] { return lo + static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(span)); };
  const Eigen::Index cx = draw();
  const Eigen::Index cy = draw();
  return mosaic_at(inputs, out_size, cx, cy);
}

PixelRect sample_cutmix_rect(const Patch& target, const Patch& source, const AugSeed& seed) {
  Rng rng = make_rng(seed);
  const double area = static_cast<double>(target.width() * target.height());
  for (int attempt = 0; attempt <= kCutmixMaxResamples; ++attempt) {
    const double fraction = 0.1 + 0.3 * uniform01(rng);
    const double aspect = 0.5 + 1.5 * uniform01(rng);
    const auto w = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::nearbyint(std::sqrt(fraction * area * aspect))));
    const auto h = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::nearbyint(std::sqrt(fraction * area / aspect))));
    const double ux = uniform01(rng);
    const double uy = uniform01(rng);
    if (w > target.width() || h > target.height()) continue;
    const auto x = static_cast<Eigen::Index>(ux * static_cast<double>(target.width() - w + 1));
    const auto y = static_cast<Eigen::Index>(uy * static_cast<double>(target.height() - h + 1));
    if (x + w > source.width() || y + h > source.height()) continue;
    return PixelRect{x, y, w, h};
  }
  throw std::runtime_error("cutmix: no rectangle fitting the source after " +
                           std::to_string(kCutmixMaxResamples) + " resamples");
}

LabeledPatch cutmix_rect(const LabeledPatch& target, const LabeledPatch& source, const PixelRect& rect) {
  const Patch& t = target.patch;
  const Patch& s = source.patch;
  if (rect.width < 1 || rect.height < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.width > t.width() ||
      rect.y + rect.height > t.height() || rect.x + rect.width > s.width() || rect.y + rect.height > s.height()) {
    throw std::invalid_argument("cutmix rectangle must be non-empty and inside both patches");
  }

  LabeledPatch out{t, {}};
  for (int c = 0; c < 3; ++c) {
    out.patch.channel(c).block(rect.y, rect.x, rect.height, rect.width) =
        s.channel(c).block(rect.y, rect.x, rect.height, rect.width);
  }

  const BBox region = rect.box();
  const BBox canvas = t.bounds();
  for (const auto& b : target.boxes) {
    if (region.contains(b.center())) continue;
    if (auto kept = intersection(b, canvas)) out.boxes.push_back(*kept);
  }
  for (const auto& b : source.boxes) {
    if (!region.contains(b.center())) continue;
    if (auto moved = intersection(b, region)) out.boxes.push_back(*moved);
  }
  return out;
}

LabeledPatch cutmix(const LabeledPatch& target, const LabeledPatch& source, const AugSeed& seed) {
  return cutmix_rect(target, source, sample_cutmix_rect(target.patch, source.patch, seed));
}

}  // namespace mitofuse
