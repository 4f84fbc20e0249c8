#include "mitofuse/errors.hpp"
#include "mitofuse/tiling.hpp"

#include <doctest.h>

#include <random>

using namespace mitofuse;

namespace {

SlideInfo slide(std::int64_t w, std::int64_t h) { return SlideInfo{"s", w, h, std::nullopt}; }

Detection local(double x1, double y1, double x2, double y2, std::size_t tile) {
  return Detection{BBox(x1, y1, x2, y2), 0.7, "m", "s", TileLocal{tile}};
}

}  // namespace

TEST_CASE("plan_tiles exact partition") {
  const auto plan = plan_tiles(slide(2048, 2048), 1024, 0);
  REQUIRE(plan.tiles.size() == 4);
  CHECK(plan.tiles[0] == Tile{0, 0, 0, 1024, 1024});
  CHECK(plan.tiles[1] == Tile{1, 1024, 0, 1024, 1024});
  CHECK(plan.tiles[2] == Tile{2, 0, 1024, 1024, 1024});
  CHECK(plan.tiles[3] == Tile{3, 1024, 1024, 1024, 1024});
}

TEST_CASE("plan_tiles with overlap clamps the final tile") {
  // stride 896: 0, 896, then 1792 + 1024 > 2048 clamps to 2048 - 1024
  CHECK(axis_offsets(2048, 1024, 128) == std::vector<std::int64_t>{0, 896, 1024});
  const auto plan = plan_tiles(slide(2048, 2048), 1024, 128);
  REQUIRE(plan.tiles.size() == 9);
  CHECK(plan.tiles[4].ox == 896);
  CHECK(plan.tiles[4].oy == 896);
  CHECK(plan.tiles[8].ox == 1024);
}

TEST_CASE("small slides get one tile covering the slide") {
  const auto plan = plan_tiles(slide(500, 500));
  REQUIRE(plan.tiles.size() == 1);
  CHECK(plan.tiles[0] == Tile{0, 0, 0, 500, 500});
  const auto wide = plan_tiles(slide(3000, 200), 1024, 0);
  CHECK(wide.tiles.size() == 3);
  CHECK(wide.tiles[2].ox == 3000 - 1024);
  CHECK(wide.tiles[2].height == 200);
}

TEST_CASE("plan_tiles rejects bad geometry") {
  CHECK_THROWS_AS(plan_tiles(slide(100, 100), 64, 64), std::invalid_argument);
  CHECK_THROWS_AS(plan_tiles(slide(100, 100), 64, -1), std::invalid_argument);
  CHECK_THROWS_AS(plan_tiles(slide(0, 100), 64, 0), std::invalid_argument);
  CHECK_THROWS_AS(plan_tiles(slide(100, 100), 0, 0), std::invalid_argument);
}

TEST_CASE("plan_tiles is deterministic and dense") {
  const auto a = plan_tiles(slide(5000, 3000), 1024, 100);
  const auto b = plan_tiles(slide(5000, 3000), 1024, 100);
  REQUIRE(a.tiles.size() == b.tiles.size());
  for (std::size_t i = 0; i < a.tiles.size(); ++i) {
    CHECK(a.tiles[i] == b.tiles[i]);
    CHECK(a.tiles[i].index == i);
  }
}

TEST_CASE("to_global adds the tile offset") {
  const Tile origin{0, 0, 0, 1024, 1024};
  const Tile far{5, 1024, 2048, 1024, 1024};
  CHECK(to_global(local(10, 10, 60, 60, 0), origin).bbox == BBox(10, 10, 60, 60));

  const auto g = to_global(local(10, 10, 60, 60, 5), far);
  CHECK(g.bbox == BBox(1034, 2058, 1084, 2108));
  CHECK(is_global(g.frame));
  CHECK(g.score == 0.7);
  CHECK(g.model_id == "m");

  CHECK(to_local(g, far) == local(10, 10, 60, 60, 5));
}

TEST_CASE("frame errors") {
  const Tile t{3, 1024, 0, 1024, 1024};
  CHECK_THROWS_AS(to_global(local(0, 0, 5, 5, 2), t), FrameError);
  const auto g = to_global(local(0, 0, 5, 5, 3), t);
  CHECK_THROWS_AS(to_global(g, t), FrameError);
  CHECK_THROWS_AS(to_local(local(0, 0, 5, 5, 3), t), FrameError);
  CHECK_THROWS_AS(to_local(Detection{BBox(0, 0, 5, 5), 0.5, "m", "s", SlideGlobal{}}, t), FrameError);
  CHECK_THROWS_AS(to_global(local(2000, 0, 2005, 5, 3), t), FrameError);
}

TEST_CASE("round trip is bit-exact for sub-pixel coordinates") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> q(0, 1000 * 65536);
  const Tile t{0, 40960, 1024 * 37, 1024, 1024};
  for (int i = 0; i < 2000; ++i) {
    const double x = static_cast<double>(q(rng) % (900 * 65536)) / 65536.0;
    const double y = static_cast<double>(q(rng) % (900 * 65536)) / 65536.0;
    const auto d = local(x, y, x + 37.25, y + 41.5, 0);
    CHECK(to_local(to_global(d, t), t) == d);
  }
}
