#include "mitofuse/fusion.hpp"

#include "mitofuse/errors.hpp"
#include "mitofuse/spatial_grid.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace mitofuse {

void validate(const FusionConfig& cfg) {
  if (!(cfg.score_threshold >= 0.0 && cfg.score_threshold <= 1.0)) {
    throw std::invalid_argument("score threshold must lie in [0, 1]");
  }
  if (!(cfg.nms_iou_threshold > 0.0 && cfg.nms_iou_threshold < 1.0)) {
    throw std::invalid_argument("NMS IoU threshold must lie in (0, 1)");
  }
}

bool ranks_before(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.bbox.min().x(), a.bbox.min().y(), a.model_id, a.bbox.max().x(), a.bbox.max().y()) <
         std::tie(b.bbox.min().x(), b.bbox.min().y(), b.model_id, b.bbox.max().x(), b.bbox.max().y());
}

std::vector<std::size_t> ranking(std::span<const Detection> dets, TieRule rule) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (rule == TieRule::kTotal) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ranks_before(dets[a], dets[b]); });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  }
  return order;
}

std::vector<Detection> threshold_detections(std::span<const Detection> dets, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("score threshold must lie in [0, 1]");
  std::vector<Detection> out;
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [&](const Detection& d) { return d.score >= threshold; });
  return out;
}

CandidateSet merge_model_outputs(const std::vector<std::vector<Detection>>& per_model) {
  CandidateSet out;
  bool have_slide = false;
  std::size_t total = 0;
  for (const auto& model : per_model) total += model.size();
  out.detections.reserve(total);
  for (const auto& model : per_model) {
    for (const auto& d : model) {
      if (!is_global(d.frame)) {
        throw FrameError("merge: detection from model '" + d.model_id + "' is still tile-local");
      }
      if (!have_slide) {
        out.slide_id = d.slide_id;
        have_slide = true;
      } else if (d.slide_id != out.slide_id) {
        throw FrameError("merge: mixed slides '" + out.slide_id + "' and '" + d.slide_id + "'");
      }
      out.detections.push_back(d);
    }
  }
  return out;
}

namespace {

void check_iou_threshold(double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("NMS IoU threshold must lie in (0, 1)");
  }
}

CandidateSet collect(const CandidateSet& c, const std::vector<std::size_t>& order,
                     const std::vector<char>& kept) {
  CandidateSet out{c.slide_id, {}};
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (kept[r]) out.detections.push_back(c.detections[order[r]]);
  }
  return out;
}

}  // namespace

CandidateSet nms_reference(const CandidateSet& c, double iou_threshold, TieRule rule) {
  check_iou_threshold(iou_threshold);
  const auto order = ranking(c.detections, rule);
  std::vector<char> kept(order.size(), 0);
  std::vector<std::size_t> kept_ranks;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const BBox& box = c.detections[order[r]].bbox;
    const bool suppressed = std::any_of(kept_ranks.begin(), kept_ranks.end(), [&](std::size_t k) {
      return iou(c.detections[order[k]].bbox, box) >= iou_threshold;
    });
    if (!suppressed) {
      kept[r] = 1;
      kept_ranks.push_back(r);
    }
  }
  return collect(c, order, kept);
}

CandidateSet nms(const CandidateSet& c, double iou_threshold, TieRule rule) {
  check_iou_threshold(iou_threshold);
  const auto order = ranking(c.detections, rule);
  const std::size_t n = order.size();

  std::vector<Point2d> centers(n);
  double reach = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const BBox& b = c.detections[order[r]].bbox;
    centers[r] = b.center();
    reach = std::max(reach, b.sizes().maxCoeff());
  }
  // Boxes can only overlap when their centers are closer than the mean of
  // their extents along each axis, which never exceeds the largest extent.
  const SpatialGrid grid(centers, reach > 0.0 ? reach : 1.0);

  std::vector<char> kept(n, 0);
  std::vector<char> suppressed(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    if (suppressed[r]) continue;
    kept[r] = 1;
    const BBox& box = c.detections[order[r]].bbox;
    grid.for_each_near(centers[r], reach, [&](std::size_t j) {
      if (j <= r || suppressed[j]) return;
      if (iou(box, c.detections[order[j]].bbox) >= iou_threshold) suppressed[j] = 1;
    });
  }
  return collect(c, order, kept);
}

CandidateSet fuse(const std::vector<ModelDump>& per_model, const TilePlan& plan, const FusionConfig& cfg) {
  validate(cfg);
  std::vector<std::vector<Detection>> global(per_model.size());
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    const auto kept = threshold_detections(per_model[m].detections, cfg.score_threshold);
    global[m].reserve(kept.size());
    for (const auto& d : kept) {
      if (d.slide_id != plan.slide.slide_id) {
        throw FrameError("fuse: detection for slide '" + d.slide_id + "' does not match plan slide '" +
                         plan.slide.slide_id + "'");
      }
      if (const auto* local = std::get_if<TileLocal>(&d.frame)) {
        global[m].push_back(to_global(d, plan.tile(local->tile_index)));
      } else {
        global[m].push_back(d);
      }
    }
  }
  return nms(merge_model_outputs(global), cfg.nms_iou_threshold, TieRule::kTotal);
}

CandidateSet fuse(const std::vector<ModelDump>& per_model, const FusionConfig& cfg) {
  validate(cfg);
  std::vector<std::vector<Detection>> kept(per_model.size());
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    kept[m] = threshold_detections(per_model[m].detections, cfg.score_threshold);
  }
  return nms(merge_model_outputs(kept), cfg.nms_iou_threshold, TieRule::kTotal);
}

}  // namespace mitofuse
