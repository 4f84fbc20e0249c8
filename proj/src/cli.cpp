#include "mitofuse/cli.hpp"

#include "mitofuse/augmentation.hpp"
#include "mitofuse/errors.hpp"
#include "mitofuse/evaluation.hpp"
#include "mitofuse/fusion.hpp"
#include "mitofuse/io/dump.hpp"
#include "mitofuse/io/formats.hpp"
#include "mitofuse/io/manifest.hpp"
#include "mitofuse/io/png.hpp"
#include "mitofuse/parallel.hpp"
#include "mitofuse/simulation.hpp"
#include "mitofuse/tiling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace mitofuse {

namespace {

// Parsed flag values; CLI11 binds into these.
struct TileArgs {
  std::string manifest;
  std::string slide_id = "slide";
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::int64_t tile_size = kDefaultTileSize;
  std::int64_t overlap = 0;
  std::string output;
};

struct FuseArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string plan;
  double score_threshold = kDefaultScoreThreshold;
  double nms_iou = kDefaultNmsIou;
  std::size_t threads = 1;
};

struct EvalArgs {
  std::string dump;
  std::string manifest;
  std::optional<double> radius;
  std::optional<double> iou;
  std::string json;
  std::string split;
};

struct AugmentArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> boxes;
  std::string output;
  std::string boxes_out;
  std::vector<double> hsv;
  std::optional<double> blur_sigma;
  std::vector<double> sharpen;
  std::optional<double> noise_sigma;
  bool mosaic = false;
  std::int64_t mosaic_size = 0;
  bool cutmix = false;
  std::uint64_t seed = 0;
};

struct SimulateArgs {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::size_t threads = 1;
};

struct SplitArgs {
  std::string manifest;
  double fraction = 0.8;
  std::uint64_t seed = 0;
  std::string output;
};

std::string fixed4(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

void print_metrics_header(std::ostream& out, std::size_t label_width) {
  out << std::left << std::setw(static_cast<int>(label_width)) << "slide" << std::right << std::setw(8) << "TP"
      << std::setw(8) << "FP" << std::setw(8) << "FN" << std::setw(11) << "Precision" << std::setw(9) << "Recall"
      << std::setw(9) << "F1" << '\n';
}

void print_metrics_row(std::ostream& out, std::size_t label_width, const std::string& label, const MetricsReport& m) {
  out << std::left << std::setw(static_cast<int>(label_width)) << label << std::right << std::setw(8) << m.tp
      << std::setw(8) << m.fp << std::setw(8) << m.fn << std::setw(11) << fixed4(m.precision) << std::setw(9)
      << fixed4(m.recall) << std::setw(9) << fixed4(m.f1) << '\n';
}

// Opens `path` for writing, or returns `fallback` when path is empty or "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw FormatError(path, 0, "cannot open for writing");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int run_tile(const TileArgs& a, std::ostream& out) {
  std::vector<SlideInfo> slides;
  if (!a.manifest.empty()) {
    for (const auto& s : io::read_manifest(a.manifest).slides) slides.push_back(s.info);
  } else {
    slides.push_back(SlideInfo{a.slide_id, a.width, a.height, std::nullopt});
  }
  io::ordered_json j = io::ordered_json::array();
  for (const auto& s : slides) j.push_back(io::to_json(plan_tiles(s, a.tile_size, a.overlap)));
  Output o(a.output, out);
  o.get() << (a.manifest.empty() ? j[0] : j).dump(2) << '\n';
  return kExitOk;
}

int run_fuse(const FuseArgs& a, std::ostream& out) {
  const FusionConfig cfg{a.score_threshold, a.nms_iou};
  validate(cfg);

  std::map<std::string, TilePlan> plans;
  if (!a.plan.empty()) {
    for (auto& p : io::read_tile_plans(a.plan)) plans.emplace(p.slide.slide_id, std::move(p));
  }

  // slide -> records in input order (files in argument order).
  std::map<std::string, std::vector<Detection>> by_slide;
  for (const auto& path : a.inputs) {
    for (auto& d : io::read_dump_records(path)) by_slide[d.slide_id].push_back(std::move(d));
  }

  std::vector<const std::string*> slide_ids;
  std::vector<const std::vector<Detection>*> records;
  for (const auto& [slide, recs] : by_slide) {
    slide_ids.push_back(&slide);
    records.push_back(&recs);
  }
  std::vector<CandidateSet> fused(slide_ids.size());
  parallel_for(slide_ids.size(), a.threads, [&](std::size_t i) {
    const auto per_model = io::group_by_model(*records[i]);
    const bool any_local = std::any_of(records[i]->begin(), records[i]->end(),
                                       [](const Detection& d) { return !is_global(d.frame); });
    if (any_local) {
      const auto it = plans.find(*slide_ids[i]);
      if (it == plans.end()) {
        throw FrameError("slide '" + *slide_ids[i] + "' has tile-local records but no tile plan (use --plan)");
      }
      fused[i] = fuse(per_model, it->second, cfg);
    } else {
      fused[i] = fuse(per_model, cfg);
    }
  });

  Output o(a.output, out);
  for (const auto& c : fused) io::write_dump(o.get(), c.detections);
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  MatchCriterion crit = CenterDistance{};
  if (a.iou) crit = BoxIoU{*a.iou};
  if (a.radius) crit = CenterDistance{*a.radius};
  validate(crit);

  const auto manifest = io::read_manifest(a.manifest);
  std::vector<AnnotationSet> gt;
  for (std::size_t i = 0; i < manifest.slides.size(); ++i) {
    const auto& split = manifest.slides[i].split;
    if (!a.split.empty() && (!split || a.split != io::to_string(*split))) continue;
    gt.push_back(manifest.annotations(i));
  }

  std::map<std::string, CandidateSet> by_slide;
  for (auto& d : io::read_dump_records(a.dump)) {
    const auto* slide = manifest.find(d.slide_id);
    if (slide == nullptr) {
      throw FormatError(a.dump, 0, "detections reference slide '" + d.slide_id + "' missing from the manifest");
    }
    if (!a.split.empty() && (!slide->split || a.split != io::to_string(*slide->split))) continue;
    auto& c = by_slide[d.slide_id];
    c.slide_id = d.slide_id;
    c.detections.push_back(std::move(d));
  }
  std::vector<CandidateSet> dets;
  for (auto& [slide, c] : by_slide) dets.push_back(std::move(c));

  const auto summary = evaluate(dets, gt, crit);

  std::size_t label_width = 8;
  for (const auto& s : summary.slides) label_width = std::max(label_width, s.slide_id.size() + 2);
  print_metrics_header(out, label_width);
  for (const auto& s : summary.slides) print_metrics_row(out, label_width, s.slide_id, s.metrics);
  print_metrics_row(out, label_width, "total", summary.total);

  if (!a.json.empty()) {
    Output o(a.json, out);
    o.get() << io::to_json(summary).dump(2) << '\n';
  }
  return kExitOk;
}

int run_augment(const AugmentArgs& a, std::ostream& err) {
  if (!a.boxes.empty() && a.boxes.size() != a.inputs.size()) {
    throw std::invalid_argument("--boxes must be given once per input image");
  }
  std::vector<LabeledPatch> inputs;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    inputs.push_back(LabeledPatch{io::read_png(a.inputs[i]), a.boxes.empty() ? std::vector<BBox>{} : io::read_boxes(a.boxes[i])});
  }

  LabeledPatch result = inputs.front();
  if (a.mosaic && a.cutmix) throw std::invalid_argument("--mosaic and --cutmix are mutually exclusive");
  if (a.mosaic) {
    if (inputs.size() != 4) throw std::invalid_argument("--mosaic needs exactly 4 input images");
    Eigen::Index size = a.mosaic_size;
    if (size == 0) {
      for (const auto& in : inputs) size = std::max({size, in.patch.width(), in.patch.height()});
    }
    result = mosaic({inputs[0], inputs[1], inputs[2], inputs[3]}, size, AugSeed{a.seed, 0});
  } else if (a.cutmix) {
    if (inputs.size() != 2) throw std::invalid_argument("--cutmix needs a target and a source image");
    result = cutmix(inputs[0], inputs[1], AugSeed{a.seed, 1});
  } else if (inputs.size() != 1) {
    throw std::invalid_argument("several inputs given without --mosaic or --cutmix");
  }

  if (!a.hsv.empty()) {
    if (a.hsv.size() != 3) throw std::invalid_argument("--hsv-shift expects h,s,v");
    result.patch = hsv_shift(result.patch, a.hsv[0], a.hsv[1], a.hsv[2]);
  }
  if (a.blur_sigma) result.patch = gaussian_blur(result.patch, *a.blur_sigma);
  if (!a.sharpen.empty()) {
    if (a.sharpen.size() != 2) throw std::invalid_argument("--sharpen expects amount,sigma");
    result.patch = sharpen(result.patch, a.sharpen[0], a.sharpen[1]);
  }
  if (a.noise_sigma) result.patch = gaussian_noise(result.patch, *a.noise_sigma, AugSeed{a.seed, 2});

  io::write_png(a.output, result.patch);
  std::string boxes_out = a.boxes_out;
  if (boxes_out.empty()) boxes_out = std::filesystem::path(a.output).replace_extension(".json").string();
  io::write_boxes(boxes_out, result.boxes);
  err << "wrote " << a.output << " (" << result.patch.width() << "x" << result.patch.height() << ", "
      << result.boxes.size() << " boxes) and " << boxes_out << '\n';
  return kExitOk;
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  auto cfg = io::read_experiment_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.seeds) cfg.n_seeds = *a.seeds;
  const auto reports = run_experiment(cfg, a.threads);

  MetricsReport mean_a;
  MetricsReport mean_b;
  MetricsReport mean_fused;
  std::size_t recall_wins = 0;
  std::size_t f1_wins = 0;
  const auto accumulate = [](MetricsReport& acc, const MetricsReport& m) {
    acc.tp += m.tp;
    acc.fp += m.fp;
    acc.fn += m.fn;
    acc.precision += m.precision;
    acc.recall += m.recall;
    acc.f1 += m.f1;
  };
  for (const auto& r : reports) {
    accumulate(mean_a, r.a);
    accumulate(mean_b, r.b);
    accumulate(mean_fused, r.fused);
    recall_wins += r.fused.recall > std::max(r.a.recall, r.b.recall);
    f1_wins += r.fused.f1 > std::max(r.a.f1, r.b.f1);
  }
  const double n = reports.empty() ? 1.0 : static_cast<double>(reports.size());
  for (auto* m : {&mean_a, &mean_b, &mean_fused}) {
    m->precision /= n;
    m->recall /= n;
    m->f1 /= n;
  }

  std::size_t label_width = std::max<std::size_t>({8, cfg.persona_a.name.size() + 2, cfg.persona_b.name.size() + 2});
  out << "mean over " << reports.size() << " seeds (counts summed)\n";
  print_metrics_header(out, label_width);
  print_metrics_row(out, label_width, cfg.persona_a.name, mean_a);
  print_metrics_row(out, label_width, cfg.persona_b.name, mean_b);
  print_metrics_row(out, label_width, "fused", mean_fused);
  out << "fused recall above both: " << recall_wins << "/" << reports.size() << '\n';
  out << "fused F1 above both:     " << f1_wins << "/" << reports.size() << '\n';

  if (!a.output.empty()) {
    io::ordered_json j;
    j["config"] = io::to_json(cfg);
    j["trials"] = io::ordered_json::array();
    for (const auto& r : reports) j["trials"].push_back(io::to_json(r));
    j["summary"] = {{"mean_a", io::to_json(mean_a)},
                    {"mean_b", io::to_json(mean_b)},
                    {"mean_fused", io::to_json(mean_fused)},
                    {"fused_recall_wins", recall_wins},
                    {"fused_f1_wins", f1_wins}};
    Output o(a.output, out);
    o.get() << j.dump(2) << '\n';
  }
  return kExitOk;
}

int run_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  const auto split = io::split_rois(io::read_manifest(a.manifest), a.fraction, a.seed);
  Output o(a.output, out);
  io::write_manifest(o.get(), split);
  const auto s = io::summarize_split(split);
  err << "train " << s.train << ", test " << s.test << " (train fraction " << fixed4(s.train_fraction) << ")\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tiled detection fusion, evaluation, augmentation and simulation for mitosis detection"};
  app.name("mitofuse");
  app.require_subcommand(1);
  const std::size_t default_threads = default_thread_count();

  TileArgs tile;
  auto* tile_cmd = app.add_subcommand("tile", "Plan a tile grid over a slide (or every slide of a manifest)");
  tile_cmd->add_option("--manifest", tile.manifest, "Dataset manifest JSON")->check(CLI::ExistingFile);
  tile_cmd->add_option("--slide-id", tile.slide_id, "Slide identifier")->capture_default_str();
  auto* width_opt = tile_cmd->add_option("--width", tile.width, "Slide width in pixels");
  auto* height_opt = tile_cmd->add_option("--height", tile.height, "Slide height in pixels");
  width_opt->needs(height_opt);
  height_opt->needs(width_opt);
  width_opt->excludes("--manifest");
  tile_cmd->add_option("--tile-size", tile.tile_size, "Tile edge length in pixels")->capture_default_str();
  tile_cmd->add_option("--overlap", tile.overlap, "Overlap between neighboring tiles")->capture_default_str();
  tile_cmd->add_option("-o,--output", tile.output, "Output plan JSON (default stdout)");

  FuseArgs fuse_args;
  fuse_args.threads = default_threads;
  auto* fuse_cmd = app.add_subcommand("fuse", "Threshold, map to slide coordinates, pool and NMS model dumps");
  fuse_cmd->add_option("inputs", fuse_args.inputs, "Detection dumps (JSONL)")->required()->check(CLI::ExistingFile);
  fuse_cmd->add_option("-o,--output", fuse_args.output, "Fused dump (default stdout)");
  fuse_cmd->add_option("--plan", fuse_args.plan, "Tile plan JSON for tile-local records")->check(CLI::ExistingFile);
  fuse_cmd->add_option("--score-threshold", fuse_args.score_threshold, "Keep detections with score >= this")
      ->capture_default_str();
  fuse_cmd->add_option("--nms-iou", fuse_args.nms_iou, "Suppress boxes with IoU >= this against a kept box")
      ->capture_default_str();
  fuse_cmd->add_option("--threads", fuse_args.threads, std::string("Worker threads (default $") + kThreadsEnv + ")");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Match a dump against manifest annotations and report P/R/F1");
  eval_cmd->add_option("dump", eval.dump, "Detection dump (JSONL, slide frame)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("manifest", eval.manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
  auto* radius_opt = eval_cmd->add_option("--radius", eval.radius, "Center-distance match radius in pixels (default 30)");
  eval_cmd->add_option("--iou", eval.iou, "Match by box IoU >= this instead")->excludes(radius_opt);
  eval_cmd->add_option("--json", eval.json, "Also write the report as JSON");
  eval_cmd->add_option("--split", eval.split, "Only evaluate slides of this split")
      ->check(CLI::IsMember({"train", "test"}));

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment", "Augment PNG patches and their box annotations");
  aug_cmd->add_option("inputs", aug.inputs, "Input PNG(s): 1, or 4 with --mosaic, or target+source with --cutmix")
      ->required()
      ->check(CLI::ExistingFile);
  aug_cmd->add_option("--boxes", aug.boxes, "Box JSON per input, in input order")->check(CLI::ExistingFile);
  aug_cmd->add_option("-o,--output", aug.output, "Output PNG")->required();
  aug_cmd->add_option("--boxes-out", aug.boxes_out, "Output box JSON (default: output with .json extension)");
  aug_cmd->add_option("--hsv-shift", aug.hsv, "Hue degrees, saturation scale, value scale: h,s,v")->delimiter(',');
  aug_cmd->add_option("--blur-sigma", aug.blur_sigma, "Gaussian blur sigma");
  aug_cmd->add_option("--sharpen", aug.sharpen, "Unsharp mask amount,sigma")->delimiter(',');
  aug_cmd->add_option("--noise-sigma", aug.noise_sigma, "Gaussian noise sigma (channel units)");
  aug_cmd->add_flag("--mosaic", aug.mosaic, "Four-image mosaic");
  aug_cmd->add_option("--mosaic-size", aug.mosaic_size, "Mosaic canvas edge (default: largest input edge)");
  aug_cmd->add_flag("--cutmix", aug.cutmix, "Paste a random source rectangle into the target");
  aug_cmd->add_option("--seed", aug.seed, "Random seed")->capture_default_str();

  SimulateArgs sim;
  sim.threads = default_threads;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the synthetic two-detector ensemble experiment");
  sim_cmd->add_option("config", sim.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("-o,--output", sim.output, "Write the full report as JSON");
  sim_cmd->add_option("--seed", sim.seed, "Override the base seed");
  sim_cmd->add_option("--seeds", sim.seeds, "Override the number of seeds");
  sim_cmd->add_option("--threads", sim.threads, std::string("Worker threads (default $") + kThreadsEnv + ")");

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Seeded train/test split of the manifest ROIs");
  split_cmd->add_option("manifest", split.manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--fraction", split.fraction, "Train fraction")->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "Random seed")->capture_default_str();
  split_cmd->add_option("-o,--output", split.output, "Output manifest (default stdout)");

  std::vector<std::string> argv_store{"mitofuse"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (tile_cmd->parsed()) {
      if (tile.manifest.empty() && (tile.width < 1 || tile.height < 1)) {
        err << "error: tile needs --manifest or positive --width and --height\n\n" << tile_cmd->help();
        return kExitUsage;
      }
      return run_tile(tile, out);
    }
    if (fuse_cmd->parsed()) return run_fuse(fuse_args, out);
    if (eval_cmd->parsed()) return run_eval(eval, out);
    if (aug_cmd->parsed()) return run_augment(aug, err);
    if (sim_cmd->parsed()) return run_simulate(sim, out);
    if (split_cmd->parsed()) return run_split(split, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace mitofuse
