#include "mitofuse/evaluation.hpp"

#include "mitofuse/errors.hpp"
#include "mitofuse/spatial_grid.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace mitofuse {

void validate(const MatchCriterion& crit) {
  if (const auto* cd = std::get_if<CenterDistance>(&crit)) {
    if (!(cd->radius > 0.0) || !std::isfinite(cd->radius)) {
      throw std::invalid_argument("match radius must be positive");
    }
  } else if (const auto* bi = std::get_if<BoxIoU>(&crit)) {
    if (!(bi->threshold > 0.0 && bi->threshold < 1.0)) {
      throw std::invalid_argument("match IoU threshold must lie in (0, 1)");
    }
  }
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  MetricsReport r{tp, fp, fn, 0.0, 0.0, 0.0};
  const auto ratio = [](std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  };
  if (tp + fp > 0) {
    r.precision = ratio(tp, tp + fp);
  } else {
    r.precision = fn == 0 ? 1.0 : 0.0;
  }
  if (tp + fn > 0) {
    r.recall = ratio(tp, tp + fn);
  } else {
    r.recall = fp == 0 ? 1.0 : 0.0;
  }
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

MatchResult match_greedy(std::span<const Detection> dets, const AnnotationSet& gt, const MatchCriterion& crit) {
  validate(crit);
  for (const auto& d : dets) {
    if (!is_global(d.frame)) throw FrameError("evaluate: detection is still tile-local");
    if (d.slide_id != gt.slide_id) {
      throw FrameError("evaluate: detection slide '" + d.slide_id + "' does not match annotations of '" +
                       gt.slide_id + "'");
    }
  }

  const auto* cd = std::get_if<CenterDistance>(&crit);
  double reach = 0.0;
  if (cd != nullptr) {
    reach = cd->radius;
  } else {
    double extent = 0.0;
    for (const auto& d : dets) extent = std::max(extent, d.bbox.sizes().maxCoeff());
    reach = (extent + gt.box_size) / 2.0;
  }
  const SpatialGrid grid(gt.centers, std::max(reach, 1e-9));

  MatchResult out;
  std::vector<char> claimed(gt.size(), 0);
  for (const std::size_t di : ranking(dets, TieRule::kTotal)) {
    const BBox& box = dets[di].bbox;
    const Point2d center = box.center();

    // Closeness key: distance for CenterDistance, -iou for BoxIoU.
    double best_key = std::numeric_limits<double>::infinity();
    std::size_t best = gt.size();
    grid.for_each_near(center, reach, [&](std::size_t ai) {
      if (claimed[ai]) return;
      double key = 0.0;
      if (cd != nullptr) {
        key = (center - gt.centers[ai]).norm();
        if (key > cd->radius) return;
      } else {
        const double overlap = iou(box, gt.box(ai));
        if (overlap < std::get<BoxIoU>(crit).threshold) return;
        key = -overlap;
      }
      if (key < best_key || (key == best_key && ai < best)) {
        best_key = key;
        best = ai;
      }
    });

    if (best < gt.size()) {
      claimed[best] = 1;
      out.tp_pairs.emplace_back(di, best);
    } else {
      out.fp.push_back(di);
    }
  }
  std::sort(out.fp.begin(), out.fp.end());
  for (std::size_t ai = 0; ai < gt.size(); ++ai) {
    if (!claimed[ai]) out.fn.push_back(ai);
  }
  return out;
}

MatchResult match_greedy(const CandidateSet& dets, const AnnotationSet& gt, const MatchCriterion& crit) {
  return match_greedy(std::span<const Detection>(dets.detections), gt, crit);
}

Counts counts_of(const MatchResult& m) { return Counts{m.tp_pairs.size(), m.fp.size(), m.fn.size()}; }

MetricsReport evaluate(const CandidateSet& dets, const AnnotationSet& gt, const MatchCriterion& crit) {
  return metrics_from_counts(counts_of(match_greedy(dets, gt, crit)));
}

EvaluationSummary evaluate(const std::vector<CandidateSet>& dets, const std::vector<AnnotationSet>& gt,
                           const MatchCriterion& crit) {
  validate(crit);
  std::map<std::string, const CandidateSet*> by_slide_dets;
  std::map<std::string, const AnnotationSet*> by_slide_gt;
  for (const auto& c : dets) {
    if (!by_slide_dets.emplace(c.slide_id, &c).second) {
      throw std::invalid_argument("evaluate: duplicate detection set for slide '" + c.slide_id + "'");
    }
  }
  for (const auto& a : gt) {
    if (!by_slide_gt.emplace(a.slide_id, &a).second) {
      throw std::invalid_argument("evaluate: duplicate annotation set for slide '" + a.slide_id + "'");
    }
  }

  std::map<std::string, Counts> counts;
  for (const auto& [slide, a] : by_slide_gt) {
    const auto it = by_slide_dets.find(slide);
    if (it == by_slide_dets.end()) {
      counts[slide] = Counts{0, 0, a->size()};
    } else {
      counts[slide] = counts_of(match_greedy(*it->second, *a, crit));
    }
  }
  for (const auto& [slide, c] : by_slide_dets) {
    if (!by_slide_gt.count(slide)) {
      for (const auto& d : c->detections) {
        if (!is_global(d.frame)) throw FrameError("evaluate: detection is still tile-local");
      }
      counts[slide] = Counts{0, c->detections.size(), 0};
    }
  }

  EvaluationSummary summary;
  Counts total;
  for (const auto& [slide, c] : counts) {
    summary.slides.push_back(SlideEvaluation{slide, c, metrics_from_counts(c)});
    total += c;
  }
  summary.total = metrics_from_counts(total);
  return summary;
}

}  // namespace mitofuse
