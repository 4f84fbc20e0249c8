#include "mitofuse/cli.hpp"
#include "mitofuse/io/dump.hpp"
#include "mitofuse/io/formats.hpp"
#include "mitofuse/io/manifest.hpp"
#include "mitofuse/io/png.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mitofuse;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
  const fs::path dir = fs::path(MITOFUSE_TEST_TMP) / "cli";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("usage errors") {
  const auto none = run({});
  CHECK(none.code == kExitUsage);

  const auto unknown = run({"fuse", "--bogus"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("error:") != std::string::npos);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"tile"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("fuse applies threshold and NMS with the documented defaults") {
  const auto in = tmp("models.jsonl");
  write_text(in,
             R"({"slide_id":"s","frame":"global","box":[0,0,10,10],"score":0.9,"model_id":"a"})" "\n"
             R"({"slide_id":"s","frame":"global","box":[1,0,11,10],"score":0.8,"model_id":"b"})" "\n"
             R"({"slide_id":"s","frame":"global","box":[50,50,60,60],"score":0.399,"model_id":"b"})" "\n"
             R"({"slide_id":"s","frame":"global","box":[70,70,80,80],"score":0.3989,"model_id":"a"})" "\n"
             // iou with the first box is 0.3 < 0.4: both survive
             R"({"slide_id":"s","frame":"global","box":[0,0,10,3],"score":0.7,"model_id":"a"})" "\n");
  const auto out = tmp("fused.jsonl");
  const auto r = run({"fuse", in.string(), "-o", out.string(), "--threads", "2"});
  REQUIRE(r.code == kExitOk);
  const auto fused = io::read_dump_records(out);
  REQUIRE(fused.size() == 3);
  CHECK(fused[0].bbox == BBox(0, 0, 10, 10));
  CHECK(fused[1].bbox == BBox(0, 0, 10, 3));
  CHECK(fused[2].score == 0.399);

  const auto strict = run({"fuse", in.string(), "--score-threshold", "0.85"});
  CHECK(strict.code == kExitOk);
  std::istringstream lines(strict.out);
  CHECK(io::read_dump_records(lines, "stdout").size() == 1);

  const auto bad = tmp("bad.jsonl");
  write_text(bad, R"({"slide_id":"s","frame":"global","box":[0,0,10,10],"score":1.5,"model_id":"a"})" "\n");
  const auto e = run({"fuse", bad.string()});
  CHECK(e.code == kExitDataError);
  CHECK(e.err.find("bad.jsonl:1") != std::string::npos);
}

TEST_CASE("tile, fuse with plan, eval") {
  const auto manifest = tmp("manifest.json");
  write_text(manifest, R"({"box_size": 10, "slides": [
    {"slide_id": "s", "width": 200, "height": 100, "split": "test", "annotations": [[15, 15], [120, 50], [180, 90]]}]})");
  const auto plan = tmp("plan.json");
  const auto t = run({"tile", "--manifest", manifest.string(), "--tile-size", "100", "-o", plan.string()});
  REQUIRE(t.code == kExitOk);
  REQUIRE(io::read_tile_plans(plan).at(0).tiles.size() == 2);

  const auto local = tmp("local.jsonl");
  write_text(local,
             R"({"slide_id":"s","tile_index":0,"frame":"local","box":[10,10,20,20],"score":0.9,"model_id":"a"})" "\n"
             R"({"slide_id":"s","tile_index":1,"frame":"local","box":[15,45,25,55],"score":0.9,"model_id":"a"})" "\n"
             R"({"slide_id":"s","tile_index":1,"frame":"local","box":[60,10,70,20],"score":0.5,"model_id":"a"})" "\n");
  const auto fused = tmp("fused_plan.jsonl");
  REQUIRE(run({"fuse", local.string(), "--plan", plan.string(), "-o", fused.string()}).code == kExitOk);
  const auto recs = io::read_dump_records(fused);
  REQUIRE(recs.size() == 3);
  CHECK(recs[1].bbox == BBox(115, 45, 125, 55));
  CHECK(is_global(recs[1].frame));

  const auto json = tmp("report.json");
  const auto e = run({"eval", fused.string(), manifest.string(), "--json", json.string()});
  REQUIRE(e.code == kExitOk);
  // tp 2, fp 1, fn 1
  CHECK(e.out.find("0.6667") != std::string::npos);
  CHECK(e.out.find("total") != std::string::npos);
  const auto report = io::read_json_file(json);
  CHECK(report["total"]["tp"] == 2);

  // nothing is in the train split: empty totals
  CHECK(run({"eval", fused.string(), manifest.string(), "--iou", "0.99", "--split", "train"}).out.find("total          0       0       0") != std::string::npos);
  CHECK(run({"eval", fused.string(), manifest.string(), "--radius", "3", "--iou", "0.5"}).code == kExitUsage);

  // local records without a plan are a data error
  CHECK(run({"fuse", local.string()}).code == kExitDataError);
}

TEST_CASE("split") {
  const auto manifest = tmp("rois.json");
  std::string slides;
  for (int i = 0; i < 10; ++i) {
    slides += std::string(i ? "," : "") + R"({"slide_id": "r)" + std::to_string(i) +
              R"(", "width": 100, "height": 100, "annotations": [[50, 50]]})";
  }
  write_text(manifest, R"({"box_size": 20, "slides": [)" + slides + "]}");
  const auto out = tmp("rois_split.json");
  const auto r = run({"split", manifest.string(), "--seed", "3", "-o", out.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.err.find("train 8, test 2") != std::string::npos);
  const auto s = io::summarize_split(io::read_manifest(out));
  CHECK(s.train == 8);
}

TEST_CASE("simulate") {
  const auto cfg = tmp("sim.json");
  write_text(cfg, R"({"ground_truth": {"width": 1500, "height": 1500, "n_objects": 40},
    "persona_a": {"name": "alpha", "detect_prob": 0.7, "fp_per_megapixel": 2},
    "persona_b": {"name": "beta", "detect_prob": 0.7, "fp_per_megapixel": 2},
    "n_seeds": 3})");
  const auto out = tmp("sim_report.json");
  const auto r = run({"simulate", cfg.string(), "--seeds", "4", "-o", out.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("mean over 4 seeds") != std::string::npos);
  CHECK(r.out.find("alpha") != std::string::npos);
  CHECK(io::read_json_file(out)["trials"].size() == 4);
}

TEST_CASE("augment") {
  Patch p(32, 24, {200, 40, 40});
  const auto img = tmp("in.png");
  io::write_png(img, p);
  const auto boxes = tmp("in_boxes.json");
  io::write_boxes(boxes, {BBox(2, 2, 12, 12)});

  const auto out = tmp("out.png");
  const auto r = run({"augment", img.string(), "--boxes", boxes.string(), "-o", out.string(), "--hsv-shift", "120,1,1",
                      "--blur-sigma", "1"});
  REQUIRE(r.code == kExitOk);
  CHECK(io::read_png(out).pixel(5, 5) == Rgb{40, 200, 40});
  CHECK(io::read_boxes(tmp("out.json")) == std::vector<BBox>{BBox(2, 2, 12, 12)});

  const auto m = run({"augment", img.string(), img.string(), img.string(), img.string(), "--mosaic", "--mosaic-size", "48",
                      "-o", tmp("mosaic.png").string(), "--seed", "5"});
  REQUIRE(m.code == kExitOk);
  CHECK(io::read_png(tmp("mosaic.png")).width() == 48);

  CHECK(run({"augment", img.string(), img.string(), "--mosaic", "-o", tmp("x.png").string()}).code != kExitOk);
}
