#include "mitofuse/simulation.hpp"

#include "mitofuse/parallel.hpp"
#include "mitofuse/random.hpp"
#include "mitofuse/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string_view>

namespace mitofuse {

namespace {

constexpr std::uint64_t kGroundTruthStream = 0x67745f63656e7472ULL;
constexpr std::size_t kMaxRejections = 10000;
constexpr std::size_t kMaxFpRejections = 1000;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double shared_latent(std::uint64_t seed, std::string_view tag, std::size_t i) {
  const bool flip = !tag.empty() && tag.front() == '~';
  if (flip) tag.remove_prefix(1);
  const std::uint64_t bits = mix64(mix64(seed ^ fnv1a(tag)) + static_cast<std::uint64_t>(i));
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return flip ? 1.0 - u : u;
}

double draw_score(const ScoreDistribution& dist, Rng& rng, std::normal_distribution<double>& unit) {
  return std::clamp(dist.mean + dist.spread * unit(rng), 0.0, 1.0);
}

// Incremental occupancy grid with cell >= min_separation, so conflicts can
// only come from the 3x3 neighborhood.
class PlacementGrid {
 public:
  PlacementGrid(double width, double height, double min_sep, std::size_t n) : min_sep_(min_sep) {
    const double coarse = std::sqrt(width * height / (4.0 * static_cast<double>(std::max<std::size_t>(n, 1))));
    cell_ = std::max({min_sep, coarse, 1.0});
    nx_ = static_cast<std::int64_t>(width / cell_) + 1;
    ny_ = static_cast<std::int64_t>(height / cell_) + 1;
    cells_.resize(static_cast<std::size_t>(nx_ * ny_));
  }

  bool free(const Point2d& p, const std::vector<Point2d>& placed) const {
    if (min_sep_ <= 0.0) return true;
    const auto [cx, cy] = cell_of(p);
    for (std::int64_t y = std::max<std::int64_t>(0, cy - 1); y <= std::min(ny_ - 1, cy + 1); ++y) {
      for (std::int64_t x = std::max<std::int64_t>(0, cx - 1); x <= std::min(nx_ - 1, cx + 1); ++x) {
        for (const std::size_t j : cells_[static_cast<std::size_t>(y * nx_ + x)]) {
          if ((placed[j] - p).norm() < min_sep_) return false;
        }
      }
    }
    return true;
  }

  void add(const Point2d& p, std::size_t index) {
    const auto [cx, cy] = cell_of(p);
    cells_[static_cast<std::size_t>(cy * nx_ + cx)].push_back(index);
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(const Point2d& p) const {
    return {std::clamp<std::int64_t>(static_cast<std::int64_t>(p.x() / cell_), 0, nx_ - 1),
            std::clamp<std::int64_t>(static_cast<std::int64_t>(p.y() / cell_), 0, ny_ - 1)};
  }

  double min_sep_;
  double cell_ = 1.0;
  std::int64_t nx_ = 1;
  std::int64_t ny_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace

void validate(const GtConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) throw std::invalid_argument("ground truth slide must have pixels");
  if (!(cfg.min_separation >= 0.0)) throw std::invalid_argument("min_separation must be >= 0");
  if (!(cfg.box_size > 0.0)) throw std::invalid_argument("box_size must be > 0");
}

void validate(const Persona& p) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(p.detect_prob)) throw std::invalid_argument("persona '" + p.name + "': detect_prob must lie in [0, 1]");
  if (!(p.fp_per_megapixel >= 0.0)) throw std::invalid_argument("persona '" + p.name + "': fp_per_megapixel must be >= 0");
  if (!(p.jitter_sigma >= 0.0)) throw std::invalid_argument("persona '" + p.name + "': jitter_sigma must be >= 0");
  if (!(p.tp_score.spread >= 0.0) || !(p.fp_score.spread >= 0.0)) {
    throw std::invalid_argument("persona '" + p.name + "': score spread must be >= 0");
  }
}

SyntheticGroundTruth generate_ground_truth(const GtConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  SyntheticGroundTruth gt;
  gt.slide = SlideInfo{cfg.slide_id, cfg.width, cfg.height, std::nullopt};
  gt.annotations.slide_id = cfg.slide_id;
  gt.annotations.box_size = cfg.box_size;
  gt.min_separation = cfg.min_separation;
  gt.seed = seed;

  const auto w = static_cast<double>(cfg.width);
  const auto h = static_cast<double>(cfg.height);
  const double half = cfg.box_size / 2.0;
  const double x0 = cfg.box_size < w ? half : 0.0;
  const double y0 = cfg.box_size < h ? half : 0.0;
  const double xspan = cfg.box_size < w ? w - cfg.box_size : w;
  const double yspan = cfg.box_size < h ? h - cfg.box_size : h;

  Rng rng = make_rng(seed, kGroundTruthStream);
  PlacementGrid grid(w, h, cfg.min_separation, cfg.n_objects);
  auto& centers = gt.annotations.centers;
  centers.reserve(cfg.n_objects);
  while (centers.size() < cfg.n_objects) {
    std::size_t rejections = 0;
    for (;;) {
      const Point2d p(x0 + uniform01(rng) * xspan, y0 + uniform01(rng) * yspan);
      if (grid.free(p, centers)) {
        grid.add(p, centers.size());
        centers.push_back(p);
        break;
      }
      if (++rejections >= kMaxRejections) {
        throw std::runtime_error("ground truth infeasible: placed " + std::to_string(centers.size()) + " of " +
                                 std::to_string(cfg.n_objects) + " objects at separation " +
                                 std::to_string(cfg.min_separation));
      }
    }
  }
  return gt;
}

SimulatedDetections simulate_detector(const SyntheticGroundTruth& gt, const Persona& p, std::uint64_t seed) {
  validate(p);
  const AnnotationSet& ann = gt.annotations;
  Rng rng = make_rng(seed, fnv1a(p.name));
  std::normal_distribution<double> unit(0.0, 1.0);

  SimulatedDetections out;
  out.tp_detection.resize(ann.size());
  const auto emit = [&](const BBox& box, double score) {
    out.detections.push_back(Detection{box, score, p.name, ann.slide_id, SlideGlobal{}});
  };

  for (std::size_t i = 0; i < ann.size(); ++i) {
    const double u = p.overlap_tag.empty() ? uniform01(rng) : shared_latent(gt.seed, p.overlap_tag, i);
    if (!(u < p.detect_prob)) continue;
    const Point2d jitter(p.jitter_sigma * unit(rng), p.jitter_sigma * unit(rng));
    const double score = draw_score(p.tp_score, rng, unit);
    out.tp_detection[i] = out.detections.size();
    emit(BBox::centered(ann.centers[i] + jitter, ann.box_size, ann.box_size), score);
  }

  const auto w = static_cast<double>(gt.slide.width);
  const auto h = static_cast<double>(gt.slide.height);
  const double expected_fp = p.fp_per_megapixel * w * h / 1e6;
  if (expected_fp <= 0.0) return out;

  std::poisson_distribution<long> poisson(expected_fp);
  const long n_fp = poisson(rng);
  const SpatialGrid grid(ann.centers, std::max(gt.min_separation, 1.0));
  for (long k = 0; k < n_fp; ++k) {
    for (std::size_t attempt = 0; attempt < kMaxFpRejections; ++attempt) {
      const Point2d c(uniform01(rng) * w, uniform01(rng) * h);
      bool clear = true;
      if (gt.min_separation > 0.0) {
        grid.for_each_near(c, gt.min_separation, [&](std::size_t j) {
          if ((ann.centers[j] - c).norm() < gt.min_separation) clear = false;
        });
      }
      if (clear) {
        emit(BBox::centered(c, ann.box_size, ann.box_size), draw_score(p.fp_score, rng, unit));
        ++out.false_positives;
        break;
      }
    }
  }
  return out;
}

std::vector<ExperimentReport> run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
  validate(cfg.ground_truth);
  validate(cfg.persona_a);
  validate(cfg.persona_b);
  validate(cfg.fusion);
  validate(cfg.criterion);

  std::vector<ExperimentReport> reports(cfg.n_seeds);
  parallel_for(cfg.n_seeds, threads, [&](std::size_t k) {
    const std::uint64_t seed = cfg.seed + k;
    const auto gt = generate_ground_truth(cfg.ground_truth, seed);
    const auto sim_a = simulate_detector(gt, cfg.persona_a, seed);
    const auto sim_b = simulate_detector(gt, cfg.persona_b, seed);

    const ModelDump dump_a{cfg.persona_a.name, sim_a.detections};
    const ModelDump dump_b{cfg.persona_b.name, sim_b.detections};

    ExperimentReport& r = reports[k];
    r.seed = seed;
    r.a = evaluate(fuse({dump_a}, cfg.fusion), gt.annotations, cfg.criterion);
    r.b = evaluate(fuse({dump_b}, cfg.fusion), gt.annotations, cfg.criterion);
    r.fused = evaluate(fuse({dump_a, dump_b}, cfg.fusion), gt.annotations, cfg.criterion);

    const double tau = cfg.fusion.score_threshold;
    const auto found = [&](const SimulatedDetections& s, std::size_t i) {
      return s.tp_detection[i].has_value() && s.detections[*s.tp_detection[i]].score >= tau;
    };
    const auto fp_above = [&](const SimulatedDetections& s) {
      std::size_t n = 0;
      for (std::size_t j = s.detections.size() - s.false_positives; j < s.detections.size(); ++j) {
        n += s.detections[j].score >= tau ? 1 : 0;
      }
      return n;
    };
    EventCounts& e = r.events;
    e.n_objects = gt.annotations.size();
    for (std::size_t i = 0; i < e.n_objects; ++i) {
      const bool fa = found(sim_a, i);
      const bool fb = found(sim_b, i);
      e.found_a += fa;
      e.found_b += fb;
      e.found_both += fa && fb;
      e.found_either += fa || fb;
    }
    e.fp_a = fp_above(sim_a);
    e.fp_b = fp_above(sim_b);
  });
  return reports;
}

}  // namespace mitofuse
