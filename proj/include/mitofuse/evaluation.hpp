#ifndef MITOFUSE_EVALUATION_HPP
#define MITOFUSE_EVALUATION_HPP

#include "mitofuse/fusion.hpp"
#include "mitofuse/types.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace mitofuse {

inline constexpr double kDefaultMatchRadius = 30.0;

// A detection matches an annotation when their centers are at most `radius` apart.
struct CenterDistance {
  double radius = kDefaultMatchRadius;
};

// A detection matches an annotation box when iou >= threshold.
struct BoxIoU {
  double threshold = 0.5;
};

using MatchCriterion = std::variant<CenterDistance, BoxIoU>;

void validate(const MatchCriterion& crit);

// Indices refer to the detection list and annotation set passed to match_greedy.
struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> tp_pairs;  // (detection, annotation)
  std::vector<std::size_t> fp;
  std::vector<std::size_t> fn;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

// precision = tp/(tp+fp), recall = tp/(tp+fn). With no detections precision
// is 1 if nothing was missed and 0 otherwise; recall mirrors this when there
// are no annotations. So empty-vs-empty scores P = R = F1 = 1.
MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
inline MetricsReport metrics_from_counts(const Counts& c) { return metrics_from_counts(c.tp, c.fp, c.fn); }

// Detections claim annotations in rank order (score desc, total tie rule).
// Each claims the closest unclaimed annotation under `crit` (highest IoU for
// BoxIoU); remaining ties go to the lower annotation index.
MatchResult match_greedy(std::span<const Detection> dets, const AnnotationSet& gt, const MatchCriterion& crit);
MatchResult match_greedy(const CandidateSet& dets, const AnnotationSet& gt, const MatchCriterion& crit);

Counts counts_of(const MatchResult& m);

MetricsReport evaluate(const CandidateSet& dets, const AnnotationSet& gt, const MatchCriterion& crit = CenterDistance{});

struct SlideEvaluation {
  std::string slide_id;
  Counts counts;
  MetricsReport metrics;
};

struct EvaluationSummary {
  std::vector<SlideEvaluation> slides;
  MetricsReport total;  // micro-average over summed counts
};

// Pairs detection sets and annotation sets by slide_id. A slide with only
// detections contributes FPs, one with only annotations contributes FNs.
EvaluationSummary evaluate(const std::vector<CandidateSet>& dets, const std::vector<AnnotationSet>& gt,
                           const MatchCriterion& crit);

}  // namespace mitofuse

#endif  // MITOFUSE_EVALUATION_HPP
