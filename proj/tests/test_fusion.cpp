#include "mitofuse/errors.hpp"
#include "mitofuse/fusion.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace mitofuse;

namespace {

Detection det(double x1, double y1, double x2, double y2, double score, const std::string& model = "m",
              const std::string& slide = "s") {
  return Detection{BBox(x1, y1, x2, y2), score, model, slide, SlideGlobal{}};
}

std::vector<Detection> random_boxes(std::mt19937_64& rng, std::size_t n, double extent) {
  std::uniform_real_distribution<double> pos(0, extent);
  std::uniform_real_distribution<double> len(5, 40);
  std::uniform_int_distribution<int> coarse(0, 4);
  std::bernoulli_distribution use_coarse(0.3);
  std::uniform_real_distribution<double> score(0, 1);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    const double s = use_coarse(rng) ? coarse(rng) / 4.0 : score(rng);
    out.push_back(det(x, y, x + len(rng), y + len(rng), s, (i % 2) ? "a" : "b"));
  }
  return out;
}

}  // namespace

TEST_CASE("threshold is inclusive and order preserving") {
  const std::vector<Detection> d{det(0, 0, 1, 1, 0.5), det(0, 0, 1, 1, 0.399), det(0, 0, 1, 1, 0.3989)};
  const auto kept = threshold_detections(d, 0.399);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].score == 0.5);
  CHECK(kept[1].score == 0.399);
  CHECK(threshold_detections(d, 0.0).size() == 3);

  const std::vector<Detection> ones{det(0, 0, 1, 1, 1.0), det(0, 0, 1, 1, 0.999999)};
  CHECK(threshold_detections(ones, 1.0).size() == 1);
  CHECK_THROWS_AS(threshold_detections(d, 1.5), std::invalid_argument);
}

TEST_CASE("merge keeps provenance and rejects mixed inputs") {
  const auto a = det(0, 0, 5, 5, 0.9, "A");
  const auto b = det(10, 0, 15, 5, 0.8, "A");
  const auto c = det(20, 0, 25, 5, 0.7, "B");
  const auto merged = merge_model_outputs({{a, b}, {c}});
  REQUIRE(merged.detections.size() == 3);
  CHECK(merged.detections[2].model_id == "B");
  CHECK(merged.slide_id == "s");

  CHECK(merge_model_outputs({{}, {}}).detections.empty());
  CHECK(merge_model_outputs({{}, {c}}).detections == std::vector<Detection>{c});

  CHECK_THROWS_AS(merge_model_outputs({{a}, {det(0, 0, 1, 1, 0.5, "B", "other")}}), FrameError);
  auto loc = a;
  loc.frame = TileLocal{0};
  CHECK_THROWS_AS(merge_model_outputs({{loc}}), FrameError);
}

TEST_CASE("nms suppresses the hand-computed overlap") {
  // iou = 81/119 = 0.6807 >= 0.4
  const CandidateSet c{"s", {det(1, 1, 11, 11, 0.8), det(0, 0, 10, 10, 0.9)}};
  const auto out = nms(c, 0.4);
  REQUIRE(out.detections.size() == 1);
  CHECK(out.detections[0].bbox == BBox(0, 0, 10, 10));

  const CandidateSet disjoint{"s", {det(0, 0, 10, 10, 0.1), det(50, 50, 60, 60, 0.9)}};
  CHECK(nms(disjoint, 0.4).detections.size() == 2);
}

TEST_CASE("nms suppression is inclusive at the threshold") {
  // intersection 5x10 = 50, union 150 -> iou exactly 1/3
  const CandidateSet c{"s", {det(0, 0, 10, 10, 0.9), det(5, 0, 15, 10, 0.8)}};
  CHECK(nms(c, 1.0 / 3.0).detections.size() == 1);
  CHECK(nms(c, 0.34).detections.size() == 2);
}

TEST_CASE("tie rule orders equal scores by x1, y1, model_id") {
  const CandidateSet c{"s", {det(2, 0, 12, 10, 0.5, "a"), det(1, 0, 11, 10, 0.5, "z"), det(1, 0, 11, 10, 0.5, "b")}};
  const auto out = nms(c, 0.4);
  REQUIRE(out.detections.size() == 1);
  CHECK(out.detections[0].model_id == "b");

  const auto stable = nms(c, 0.4, TieRule::kStable);
  REQUIRE(stable.detections.size() == 1);
  CHECK(stable.detections[0].model_id == "a");
}

TEST_CASE("grid nms equals the quadratic reference and the exhaustive oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto boxes = random_boxes(rng, 1 + trial % 12, 80);
    const CandidateSet c{"s", boxes};
    const auto fast = nms(c, 0.4);
    CHECK(fast.detections == nms_reference(c, 0.4).detections);
    const auto expected = oracle::nms_exhaustive(boxes, 0.4);
    REQUIRE(expected.has_value());
    CHECK(fast.detections == *expected);
  }
}

TEST_CASE("nms invariants on random sets") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto boxes = random_boxes(rng, 60, 300);
    const CandidateSet c{"s", boxes};
    const auto kept = nms(c, 0.4).detections;

    for (std::size_t i = 0; i < kept.size(); ++i) {
      CHECK(std::find(boxes.begin(), boxes.end(), kept[i]) != boxes.end());
      for (std::size_t j = i + 1; j < kept.size(); ++j) CHECK(iou(kept[i].bbox, kept[j].bbox) < 0.4);
    }
    for (const auto& d : boxes) {
      if (std::find(kept.begin(), kept.end(), d) != kept.end()) continue;
      const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
        return iou(k.bbox, d.bbox) >= 0.4 && !ranks_before(d, k);
      });
      CHECK(dominated);
    }
    CHECK(nms(CandidateSet{"s", kept}, 0.4).detections == kept);
  }
}

TEST_CASE("pooling leaves detections isolated from the other model untouched") {
  std::mt19937_64 rng(9);
  std::size_t checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_boxes(rng, 30, 400);
    auto b = random_boxes(rng, 30, 400);
    for (auto& d : a) d.model_id = "A";
    for (auto& d : b) d.model_id = "B";
    const auto fused = nms(merge_model_outputs({a, b}), 0.4).detections;
    const auto alone = nms(CandidateSet{"s", a}, 0.4).detections;
    const auto overlaps = [](const Detection& x, const Detection& y) { return iou(x.bbox, y.bbox) >= 0.4; };

    for (std::size_t i = 0; i < a.size(); ++i) {
      // The whole overlap component of a[i] within A must avoid B; otherwise
      // a suppression chain can carry B's influence over to a[i].
      std::vector<std::size_t> component{i};
      std::vector<bool> seen(a.size(), false);
      seen[i] = true;
      for (std::size_t k = 0; k < component.size(); ++k) {
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (!seen[j] && overlaps(a[component[k]], a[j])) {
            seen[j] = true;
            component.push_back(j);
          }
        }
      }
      const bool isolated = std::all_of(component.begin(), component.end(), [&](std::size_t k) {
        return std::none_of(b.begin(), b.end(), [&](const Detection& o) { return overlaps(o, a[k]); });
      });
      if (!isolated) continue;
      ++checked;
      const bool in_fused = std::find(fused.begin(), fused.end(), a[i]) != fused.end();
      const bool in_alone = std::find(alone.begin(), alone.end(), a[i]) != alone.end();
      CHECK(in_fused == in_alone);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("fuse composes threshold, offsets, pooling and NMS") {
  const auto plan = plan_tiles(SlideInfo{"s", 2048, 1024, std::nullopt}, 1024, 0);

  SUBCASE("all below threshold") {
    const ModelDump m{"A", {Detection{BBox(0, 0, 10, 10), 0.2, "A", "s", TileLocal{0}}}};
    CHECK(fuse({m}, plan, FusionConfig{}).detections.empty());
  }
  SUBCASE("overlapping boxes from two models collapse to the stronger one") {
    const ModelDump a{"A", {Detection{BBox(0, 0, 10, 10), 0.9, "A", "s", TileLocal{1}}}};
    const ModelDump b{"B", {Detection{BBox(1, 1, 11, 11), 0.7, "B", "s", TileLocal{1}}}};
    const auto out = fuse({a, b}, plan, FusionConfig{});
    REQUIRE(out.detections.size() == 1);
    CHECK(out.detections[0].model_id == "A");
    CHECK(out.detections[0].bbox == BBox(1024, 0, 1034, 10));
  }
  SUBCASE("disjoint boxes from two models are both kept") {
    const ModelDump a{"A", {Detection{BBox(0, 0, 10, 10), 0.9, "A", "s", TileLocal{0}}}};
    const ModelDump b{"B", {Detection{BBox(0, 0, 10, 10), 0.5, "B", "s", TileLocal{1}}}};
    CHECK(fuse({a, b}, plan, FusionConfig{}).detections.size() == 2);
  }
  SUBCASE("cross-tile duplicates are resolved by the global pass") {
    const auto overlapped = plan_tiles(SlideInfo{"s", 2048, 1024, std::nullopt}, 1024, 128);
    const auto& t1 = overlapped.tile(1);
    const double lx = 1000.0 - static_cast<double>(t1.ox);
    const ModelDump a{"A",
                      {Detection{BBox(1000, 100, 1020, 120), 0.8, "A", "s", TileLocal{0}},
                       Detection{BBox(lx, 100, lx + 20, 120), 0.85, "A", "s", TileLocal{1}}}};
    const auto out = fuse({a}, overlapped, FusionConfig{});
    REQUIRE(out.detections.size() == 1);
    CHECK(out.detections[0].score == 0.85);
  }
  SUBCASE("unknown tile and wrong slide") {
    const ModelDump bad_tile{"A", {Detection{BBox(0, 0, 10, 10), 0.9, "A", "s", TileLocal{7}}}};
    CHECK_THROWS_AS(fuse({bad_tile}, plan, FusionConfig{}), std::out_of_range);
    const ModelDump bad_slide{"A", {Detection{BBox(0, 0, 10, 10), 0.9, "A", "x", TileLocal{0}}}};
    CHECK_THROWS_AS(fuse({bad_slide}, plan, FusionConfig{}), FrameError);
  }
  SUBCASE("config validation") {
    CHECK_THROWS_AS(fuse({}, plan, FusionConfig{0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fuse({}, plan, FusionConfig{-0.1, 0.4}), std::invalid_argument);
  }
}
