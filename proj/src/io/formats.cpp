#include "mitofuse/io/formats.hpp"

#include "mitofuse/errors.hpp"

#include <fstream>

namespace mitofuse::io {

namespace {

template <typename T>
void read_opt(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

ScoreDistribution score_from_json(const ordered_json& j, ScoreDistribution d) {
  read_opt(j, "mean", d.mean);
  read_opt(j, "spread", d.spread);
  return d;
}

Persona persona_from_json(const ordered_json& j, Persona p) {
  read_opt(j, "name", p.name);
  read_opt(j, "detect_prob", p.detect_prob);
  read_opt(j, "fp_per_megapixel", p.fp_per_megapixel);
  read_opt(j, "jitter_sigma", p.jitter_sigma);
  if (j.contains("tp_score")) p.tp_score = score_from_json(j["tp_score"], p.tp_score);
  if (j.contains("fp_score")) p.fp_score = score_from_json(j["fp_score"], p.fp_score);
  read_opt(j, "overlap_tag", p.overlap_tag);
  return p;
}

ordered_json to_json(const ScoreDistribution& d) { return {{"mean", d.mean}, {"spread", d.spread}}; }

ordered_json to_json(const Persona& p) {
  ordered_json j;
  j["name"] = p.name;
  j["detect_prob"] = p.detect_prob;
  j["fp_per_megapixel"] = p.fp_per_megapixel;
  j["jitter_sigma"] = p.jitter_sigma;
  j["tp_score"] = to_json(p.tp_score);
  j["fp_score"] = to_json(p.fp_score);
  j["overlap_tag"] = p.overlap_tag;
  return j;
}

}  // namespace

ordered_json to_json(const TilePlan& plan) {
  ordered_json j;
  j["slide"] = {{"slide_id", plan.slide.slide_id}, {"width", plan.slide.width}, {"height", plan.slide.height}};
  if (plan.slide.microns_per_pixel) j["slide"]["microns_per_pixel"] = *plan.slide.microns_per_pixel;
  j["tile_size"] = plan.tile_size;
  j["overlap"] = plan.overlap;
  j["tiles"] = ordered_json::array();
  for (const auto& t : plan.tiles) {
    j["tiles"].push_back({{"index", t.index}, {"x", t.ox}, {"y", t.oy}, {"width", t.width}, {"height", t.height}});
  }
  return j;
}

TilePlan tile_plan_from_json(const ordered_json& j) {
  TilePlan plan;
  const auto& s = j.at("slide");
  plan.slide.slide_id = s.at("slide_id").get<std::string>();
  plan.slide.width = s.at("width").get<std::int64_t>();
  plan.slide.height = s.at("height").get<std::int64_t>();
  if (s.contains("microns_per_pixel")) plan.slide.microns_per_pixel = s["microns_per_pixel"].get<double>();
  plan.tile_size = j.at("tile_size").get<std::int64_t>();
  plan.overlap = j.at("overlap").get<std::int64_t>();
  for (const auto& t : j.at("tiles")) {
    plan.tiles.push_back(Tile{t.at("index").get<std::size_t>(), t.at("x").get<std::int64_t>(),
                              t.at("y").get<std::int64_t>(), t.at("width").get<std::int64_t>(),
                              t.at("height").get<std::int64_t>()});
    if (plan.tiles.back().index != plan.tiles.size() - 1) {
      throw std::invalid_argument("tile indices must be dense and ordered from 0");
    }
  }
  return plan;
}

std::vector<TilePlan> read_tile_plans(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  std::vector<TilePlan> plans;
  try {
    if (j.is_array()) {
      for (const auto& p : j) plans.push_back(tile_plan_from_json(p));
    } else {
      plans.push_back(tile_plan_from_json(j));
    }
  } catch (const std::exception& e) {
    throw FormatError(path.string(), 0, std::string("invalid tile plan: ") + e.what());
  }
  return plans;
}

ordered_json to_json(const MetricsReport& r) {
  return {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
}

ordered_json to_json(const EvaluationSummary& s) {
  ordered_json j;
  j["slides"] = ordered_json::array();
  for (const auto& slide : s.slides) {
    ordered_json js = to_json(slide.metrics);
    js["slide_id"] = slide.slide_id;
    j["slides"].push_back(std::move(js));
  }
  j["total"] = to_json(s.total);
  return j;
}

ExperimentConfig experiment_config_from_json(const ordered_json& j) {
  ExperimentConfig cfg;
  cfg.persona_a.name = "a";
  cfg.persona_b.name = "b";
  if (j.contains("ground_truth")) {
    const auto& g = j["ground_truth"];
    read_opt(g, "slide_id", cfg.ground_truth.slide_id);
    read_opt(g, "width", cfg.ground_truth.width);
    read_opt(g, "height", cfg.ground_truth.height);
    read_opt(g, "n_objects", cfg.ground_truth.n_objects);
    read_opt(g, "min_separation", cfg.ground_truth.min_separation);
    read_opt(g, "box_size", cfg.ground_truth.box_size);
  }
  if (j.contains("persona_a")) cfg.persona_a = persona_from_json(j["persona_a"], cfg.persona_a);
  if (j.contains("persona_b")) cfg.persona_b = persona_from_json(j["persona_b"], cfg.persona_b);
  if (j.contains("fusion")) {
    read_opt(j["fusion"], "score_threshold", cfg.fusion.score_threshold);
    read_opt(j["fusion"], "nms_iou", cfg.fusion.nms_iou_threshold);
  }
  if (j.contains("evaluation")) {
    const auto& e = j["evaluation"];
    const auto kind = e.value("criterion", std::string("center_distance"));
    if (kind == "center_distance") {
      cfg.criterion = CenterDistance{e.value("radius", kDefaultMatchRadius)};
    } else if (kind == "iou") {
      cfg.criterion = BoxIoU{e.value("threshold", 0.5)};
    } else {
      throw std::invalid_argument("evaluation criterion must be \"center_distance\" or \"iou\"");
    }
  }
  read_opt(j, "n_seeds", cfg.n_seeds);
  read_opt(j, "seed", cfg.seed);
  return cfg;
}

ordered_json to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  const auto& g = cfg.ground_truth;
  j["ground_truth"] = {{"slide_id", g.slide_id}, {"width", g.width}, {"height", g.height},
                       {"n_objects", g.n_objects}, {"min_separation", g.min_separation}, {"box_size", g.box_size}};
  j["persona_a"] = to_json(cfg.persona_a);
  j["persona_b"] = to_json(cfg.persona_b);
  j["fusion"] = {{"score_threshold", cfg.fusion.score_threshold}, {"nms_iou", cfg.fusion.nms_iou_threshold}};
  if (const auto* cd = std::get_if<CenterDistance>(&cfg.criterion)) {
    j["evaluation"] = {{"criterion", "center_distance"}, {"radius", cd->radius}};
  } else {
    j["evaluation"] = {{"criterion", "iou"}, {"threshold", std::get<BoxIoU>(cfg.criterion).threshold}};
  }
  j["n_seeds"] = cfg.n_seeds;
  j["seed"] = cfg.seed;
  return j;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  try {
    return experiment_config_from_json(j);
  } catch (const std::exception& e) {
    throw FormatError(path.string(), 0, std::string("invalid experiment config: ") + e.what());
  }
}

ordered_json to_json(const ExperimentReport& r) {
  ordered_json j;
  j["seed"] = r.seed;
  j["a"] = to_json(r.a);
  j["b"] = to_json(r.b);
  j["fused"] = to_json(r.fused);
  const auto& e = r.events;
  j["events"] = {{"n_objects", e.n_objects}, {"found_a", e.found_a},       {"found_b", e.found_b},
                 {"found_both", e.found_both}, {"found_either", e.found_either}, {"fp_a", e.fp_a},
                 {"fp_b", e.fp_b}};
  return j;
}

std::vector<BBox> read_boxes(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  std::vector<BBox> boxes;
  try {
    for (const auto& b : j.at("boxes")) {
      const auto c = b.get<std::vector<double>>();
      if (c.size() != 4) throw std::invalid_argument("boxes must have 4 coordinates");
      boxes.emplace_back(c[0], c[1], c[2], c[3]);
    }
  } catch (const std::exception& e) {
    throw FormatError(path.string(), 0, std::string("invalid box list: ") + e.what());
  }
  return boxes;
}

void write_boxes(const std::filesystem::path& path, const std::vector<BBox>& boxes) {
  ordered_json j;
  j["boxes"] = ordered_json::array();
  for (const auto& b : boxes) j["boxes"].push_back({b.x1(), b.y1(), b.x2(), b.y2()});
  write_json_file(path, j);
}

ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string(), 0, "cannot open for reading");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), 0, "cannot open for writing");
  out << j.dump(2) << '\n';
}

}  // namespace mitofuse::io
