#ifndef MITOFUSE_SIMULATION_HPP
#define MITOFUSE_SIMULATION_HPP

#include "mitofuse/evaluation.hpp"
#include "mitofuse/fusion.hpp"
#include "mitofuse/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mitofuse {

struct GtConfig {
  std::string slide_id = "synthetic";
  std::int64_t width = 4000;
  std::int64_t height = 4000;
  std::size_t n_objects = 400;
  double min_separation = 100.0;
  double box_size = 50.0;
};

void validate(const GtConfig& cfg);

struct SyntheticGroundTruth {
  SlideInfo slide;
  AnnotationSet annotations;
  double min_separation = 0.0;
  std::uint64_t seed = 0;  // also drives the shared miss latents of personas
};

// Rejection-sampled centers, pairwise at least min_separation apart and far
// enough from the border to keep each box on the slide. Throws
// std::runtime_error when placement keeps failing (infeasible config).
SyntheticGroundTruth generate_ground_truth(const GtConfig& cfg, std::uint64_t seed);

// Gaussian with mean/spread, clamped to [0, 1].
struct ScoreDistribution {
  double mean = 0.5;
  double spread = 0.0;
};

// Parametric error model of a detector.
//
// Whether a persona finds annotation i is decided by a latent u_i in [0, 1):
// found iff u_i < detect_prob. Personas sharing an overlap_tag share the
// latents, so their miss sets are nested (identical for equal detect_prob).
// A tag prefixed with '~' uses 1 - u_i of the base tag, which makes the miss
// sets as disjoint as the rates allow. An empty tag draws private latents.
//
// Personas with the same name draw identical random streams for jitter,
// scores and false positives.
struct Persona {
  std::string name = "persona";
  double detect_prob = 0.8;
  double fp_per_megapixel = 0.0;
  double jitter_sigma = 0.0;
  ScoreDistribution tp_score{0.8, 0.1};
  ScoreDistribution fp_score{0.6, 0.1};
  std::string overlap_tag;
};

void validate(const Persona& p);

struct SimulatedDetections {
  std::vector<Detection> detections;
  // Per annotation: index into `detections` of its true positive, if emitted.
  std::vector<std::optional<std::size_t>> tp_detection;
  std::size_t false_positives = 0;
};

// True positives are emitted first in annotation order, then false positives.
// False positives are uniform over the slide but at least min_separation from
// every annotation; a false positive that finds no such spot is skipped.
SimulatedDetections simulate_detector(const SyntheticGroundTruth& gt, const Persona& p, std::uint64_t seed);

struct ExperimentConfig {
  GtConfig ground_truth;
  Persona persona_a;
  Persona persona_b;
  FusionConfig fusion;
  MatchCriterion criterion = CenterDistance{};
  std::size_t n_seeds = 100;
  std::uint64_t seed = 0;
};

// Ground-truth event counts taken inside the simulator, independent of the
// matching code: annotations whose true positive cleared the score threshold.
struct EventCounts {
  std::size_t n_objects = 0;
  std::size_t found_a = 0;
  std::size_t found_b = 0;
  std::size_t found_both = 0;
  std::size_t found_either = 0;
  std::size_t fp_a = 0;  // false positives above threshold
  std::size_t fp_b = 0;
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  MetricsReport a;
  MetricsReport b;
  MetricsReport fused;
  EventCounts events;
};

// One trial per seed cfg.seed + k: generate ground truth, simulate both
// personas, score each alone (threshold + NMS) and their fusion.
std::vector<ExperimentReport> run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1);

}  // namespace mitofuse

#endif  // MITOFUSE_SIMULATION_HPP
