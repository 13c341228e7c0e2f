#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ota/error.hpp"
#include "ota/geometry.hpp"
#include "ota/philox.hpp"

using namespace ota;

namespace {

BoxXYXY random_box(CounterRng& rng) {
  const double x = 200.0 * rng.uniform() - 100.0;
  const double y = 200.0 * rng.uniform() - 100.0;
  return {x, y, x + 0.1 + 60.0 * rng.uniform(), y + 0.1 + 60.0 * rng.uniform()};
}

}  // namespace

TEST_CASE("iou examples") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == doctest::Approx(1.0));
  CHECK(iou({0, 0, 1, 1}, {5, 5, 6, 6}) == 0.0);
  // intersection 1, union 4 + 4 - 1
  CHECK(iou({0, 0, 2, 2}, {1, 1, 3, 3}) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(iou({0, 0, 0, 5}, {0, 0, 0, 5}) == 0.0);  // zero area convention
  CHECK(iou({0, 0, 1, 1}, {1, 0, 2, 1}) == 0.0);  // touching edges
}

TEST_CASE("center_distance examples") {
  const GroundTruth gt{{0, 0, 10, 10}, 0};
  CHECK(center_distance({5, 5, 0, 8}, gt) == 0.0);
  CHECK(center_distance({8, 5, 0, 8}, gt) == doctest::Approx(3.0));
  CHECK(center_distance({8, 9, 0, 8}, gt) == doctest::Approx(5.0));
  CHECK(center_distance_sq({8, 9, 0, 8}, gt) == 25.0);
}

TEST_CASE("iou properties on random boxes") {
  CounterRng rng(11, 0);
  for (int t = 0; t < 2000; ++t) {
    const BoxXYXY a = random_box(rng);
    const BoxXYXY b = random_box(rng);
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(iou(a, a) == doctest::Approx(1.0));
    CHECK(ab >= 0.0);
    CHECK(ab <= std::min(a.area(), b.area()) / std::max(a.area(), b.area()) + 1e-12);

    const double dx = 500.0 * rng.uniform() - 250.0;
    const double dy = 500.0 * rng.uniform() - 250.0;
    const BoxXYXY a2{a.x1 + dx, a.y1 + dy, a.x2 + dx, a.y2 + dy};
    const BoxXYXY b2{b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy};
    CHECK(std::abs(iou(a2, b2) - ab) <= 1e-12 * std::max(1.0, ab) + 1e-13);

    CHECK(giou(a, b) <= ab + 1e-12);
    CHECK(giou(a, b) >= -1.0);
  }
}

TEST_CASE("giou equals iou when the union is the enclosing box") {
  const BoxXYXY outer{0, 0, 10, 10};
  const BoxXYXY inner{2, 3, 5, 7};
  CHECK(giou(outer, inner) == doctest::Approx(iou(outer, inner)));
  CHECK(giou(outer, outer) == doctest::Approx(1.0));
  // Disjoint boxes are penalised below zero.
  CHECK(giou({0, 0, 1, 1}, {9, 9, 10, 10}) < 0.0);
}

TEST_CASE("anchor grid layout") {
  const std::vector<int> strides{8, 16};
  const auto anchors = make_anchor_grid(20, 10, strides);
  // ceil(20/8)*ceil(10/8) + ceil(20/16)*ceil(10/16) = 3*2 + 2*1
  REQUIRE(anchors.size() == 8);
  CHECK(anchors[0] == Anchor{4, 4, 0, 8});
  CHECK(anchors[1] == Anchor{12, 4, 0, 8});
  CHECK(anchors[3] == Anchor{4, 12, 0, 8});
  CHECK(anchors[6] == Anchor{8, 8, 1, 16});
  CHECK(anchors[7] == Anchor{24, 8, 1, 16});
}

TEST_CASE("validate_scene rejects broken invariants") {
  Scene scene;
  scene.image_w = 32;
  scene.image_h = 32;
  scene.strides = {16};
  scene.anchors = make_anchor_grid(32, 32, scene.strides);
  scene.preds.cls_scores = MatrixD(4, 1, 0.5);
  scene.preds.boxes.assign(4, BoxXYXY{0, 0, 4, 4});
  scene.gts.push_back({{1, 1, 9, 9}, 0});
  CHECK_NOTHROW(validate_scene(scene));

  Scene bad = scene;
  bad.preds.cls_scores(2, 0) = 1.5;
  CHECK_THROWS_AS(validate_scene(bad), Error);

  bad = scene;
  bad.gts[0].box = {10, 10, 40, 20};
  CHECK_THROWS_AS(validate_scene(bad), Error);

  bad = scene;
  bad.gts[0].box = {3, 3, 3, 9};
  CHECK_THROWS_AS(validate_scene(bad), Error);

  bad = scene;
  bad.preds.boxes.pop_back();
  CHECK_THROWS_AS(validate_scene(bad), Error);
}
