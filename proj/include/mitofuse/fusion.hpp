#ifndef MITOFUSE_FUSION_HPP
#define MITOFUSE_FUSION_HPP

#include "mitofuse/tiling.hpp"
#include "mitofuse/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace mitofuse {

inline constexpr double kDefaultScoreThreshold = 0.399;
inline constexpr double kDefaultNmsIou = 0.4;

struct FusionConfig {
  double score_threshold = kDefaultScoreThreshold;
  double nms_iou_threshold = kDefaultNmsIou;
};

void validate(const FusionConfig& cfg);

// Pooled slide-global detections of one slide, possibly from several models.
struct CandidateSet {
  std::string slide_id;
  std::vector<Detection> detections;
};

enum class TieRule {
  // score desc, then x1, y1, model_id, x2, y2 ascending. Total over distinct
  // detections, so results do not depend on input order.
  kTotal,
  // score desc, equal scores keep their input order.
  kStable,
};

// Strict weak ordering implementing TieRule::kTotal.
bool ranks_before(const Detection& a, const Detection& b);

// Indices of `dets` in processing order under `rule`.
std::vector<std::size_t> ranking(std::span<const Detection> dets, TieRule rule);

// Detections with score >= threshold (inclusive), input order preserved.
std::vector<Detection> threshold_detections(std::span<const Detection> dets, double threshold);

// Concatenates per-model lists. Rejects local-frame detections and mixed slides.
CandidateSet merge_model_outputs(const std::vector<std::vector<Detection>>& per_model);

// Greedy NMS: walk boxes in rank order, keep a box unless it has
// iou >= iou_threshold with an already kept box. Output is in kept order.
// Uses a spatial grid over box centers; the result is identical to nms_reference.
CandidateSet nms(const CandidateSet& c, double iou_threshold, TieRule rule = TieRule::kTotal);

// Quadratic greedy NMS used to cross-check nms().
CandidateSet nms_reference(const CandidateSet& c, double iou_threshold, TieRule rule = TieRule::kTotal);

// One model's raw output for a slide. Each detection is either local to a
// tile of the plan or already slide-global.
struct ModelDump {
  std::string model_id;
  std::vector<Detection> detections;
};

// threshold per model -> to_global via tile offsets -> pool -> NMS.
CandidateSet fuse(const std::vector<ModelDump>& per_model, const TilePlan& plan, const FusionConfig& cfg);

// Same pipeline for dumps that are already in the slide frame.
CandidateSet fuse(const std::vector<ModelDump>& per_model, const FusionConfig& cfg);

}  // namespace mitofuse

#endif  // MITOFUSE_FUSION_HPP
