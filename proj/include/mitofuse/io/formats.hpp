#ifndef MITOFUSE_IO_FORMATS_HPP
#define MITOFUSE_IO_FORMATS_HPP

#include "mitofuse/evaluation.hpp"
#include "mitofuse/simulation.hpp"
#include "mitofuse/tiling.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mitofuse::io {

using ordered_json = nlohmann::ordered_json;

// Tile plan:
//   {"slide": {"slide_id": ..., "width": ..., "height": ...},
//    "tile_size": 1024, "overlap": 0,
//    "tiles": [{"index": 0, "x": 0, "y": 0, "width": 1024, "height": 1024}, ...]}
ordered_json to_json(const TilePlan& plan);
TilePlan tile_plan_from_json(const ordered_json& j);

// A plan file holds one plan object or an array of them.
std::vector<TilePlan> read_tile_plans(const std::filesystem::path& path);

// {"tp":..,"fp":..,"fn":..,"precision":..,"recall":..,"f1":..}
ordered_json to_json(const MetricsReport& r);
ordered_json to_json(const EvaluationSummary& s);

// Experiment config echoing GtConfig, both personas, fusion and evaluation:
//   {"ground_truth": {...}, "persona_a": {...}, "persona_b": {...},
//    "fusion": {"score_threshold": 0.399, "nms_iou": 0.4},
//    "evaluation": {"criterion": "center_distance", "radius": 30}
//                | {"criterion": "iou", "threshold": 0.5},
//    "n_seeds": 100, "seed": 0}
// Missing keys take the C++ defaults.
ExperimentConfig experiment_config_from_json(const ordered_json& j);
ordered_json to_json(const ExperimentConfig& cfg);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

ordered_json to_json(const ExperimentReport& r);

// Patch annotations for `augment`: {"boxes": [[x1, y1, x2, y2], ...]}
std::vector<BBox> read_boxes(const std::filesystem::path& path);
void write_boxes(const std::filesystem::path& path, const std::vector<BBox>& boxes);

ordered_json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const ordered_json& j);

}  // namespace mitofuse::io

#endif  // MITOFUSE_IO_FORMATS_HPP
