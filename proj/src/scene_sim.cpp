#include "ota/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ota/error.hpp"
#include "ota/philox.hpp"

namespace ota {

namespace {

constexpr double kScoreNoise = 0.02;
constexpr double kCellFill = 0.95;

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(Errc::kInvalidSpec, msg);
}

BoxXYXY place_inside(double cx, double cy, double w, double h, int image_w, int image_h) {
  double x1 = std::clamp(cx - 0.5 * w, 0.0, image_w - w);
  double y1 = std::clamp(cy - 0.5 * h, 0.0, image_h - h);
  return {x1, y1, x1 + w, y1 + h};
}

std::vector<GroundTruth> sample_gts(const SceneSpec& spec) {
  CounterRng rng(spec.seed, kGtStream);
  const int count = spec.num_gts;
  std::vector<GroundTruth> gts;
  if (count == 0) return gts;

  const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const double cell_w = static_cast<double>(spec.image_w) / grid;
  const double cell_h = static_cast<double>(spec.image_h) / grid;
  std::vector<int> cells(static_cast<std::size_t>(grid * grid));
  std::iota(cells.begin(), cells.end(), 0);
  for (std::size_t i = cells.size() - 1; i > 0; --i) {
    std::swap(cells[i], cells[rng.uniform_int(static_cast<std::uint32_t>(i + 1))]);
  }

  const double short_side = std::min(spec.image_w, spec.image_h);
  const double cluster_x = spec.image_w * (0.3 + 0.4 * rng.uniform());
  const double cluster_y = spec.image_h * (0.3 + 0.4 * rng.uniform());

  for (int i = 0; i < count; ++i) {
    const double side = short_side * (spec.min_box_frac + (spec.max_box_frac - spec.min_box_frac) * rng.uniform());
    const double aspect = std::exp(0.25 * (2.0 * rng.uniform() - 1.0));
    const double w = std::min(side * aspect, kCellFill * cell_w);
    const double h = std::min(side / aspect, kCellFill * cell_h);

    const int cell = cells[static_cast<std::size_t>(i)];
    const double cell_x0 = (cell % grid) * cell_w;
    const double cell_y0 = (cell / grid) * cell_h;
    // Kept 1% of the slack away from the cell walls so neighbours never touch.
    const double grid_cx = cell_x0 + 0.5 * w + (cell_w - w) * (0.01 + 0.98 * rng.uniform());
    const double grid_cy = cell_y0 + 0.5 * h + (cell_h - h) * (0.01 + 0.98 * rng.uniform());

    const double clus_cx = cluster_x + 0.5 * w * rng.normal();
    const double clus_cy = cluster_y + 0.5 * h * rng.normal();

    const double c = spec.crowding;
    const double cx = (1.0 - c) * grid_cx + c * clus_cx;
    const double cy = (1.0 - c) * grid_cy + c * clus_cy;
    const int cls = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(spec.num_classes)));
    gts.push_back({place_inside(cx, cy, w, h, spec.image_w, spec.image_h), cls});
  }
  return gts;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void SceneSpec::validate() const {
  require(image_w > 0 && image_h > 0, "image dimensions must be positive");
  require(!strides.empty(), "at least one pyramid level is required");
  for (int s : strides) require(s > 0, "strides must be positive");
  require(num_gts >= 0, "num_gts must be >= 0");
  require(crowding >= 0.0 && crowding <= 1.0, "crowding must be in [0,1]");
  require(num_classes >= 1, "num_classes must be >= 1");
  require(pred_noise >= 0.0 && std::isfinite(pred_noise), "pred_noise must be >= 0");
  require(score_sharpness > 0.0 && std::isfinite(score_sharpness), "score_sharpness must be > 0");
  require(min_box_frac > 0.0 && min_box_frac <= max_box_frac && max_box_frac <= 1.0,
          "box fractions must satisfy 0 < min <= max <= 1");
}

Scene generate(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.image_w = spec.image_w;
  scene.image_h = spec.image_h;
  scene.strides = spec.strides;
  scene.seed = spec.seed;
  scene.anchors = make_anchor_grid(spec.image_w, spec.image_h, spec.strides);
  scene.gts = sample_gts(spec);

  const std::size_t n = scene.anchors.size();
  const auto classes = static_cast<std::size_t>(spec.num_classes);
  scene.preds.cls_scores = MatrixD(n, classes);
  scene.preds.boxes.resize(n);

  CounterRng box_rng(spec.seed, kBoxStream);
  CounterRng score_rng(spec.seed, kScoreStream);
  const double inf = std::numeric_limits<double>::infinity();
  const double img_w = spec.image_w;
  const double img_h = spec.image_h;
  std::vector<double> class_dist(classes);

  for (std::size_t j = 0; j < n; ++j) {
    const Anchor& a = scene.anchors[j];
    std::size_t nearest = 0;
    double nearest_d2 = inf;
    std::fill(class_dist.begin(), class_dist.end(), inf);
    for (std::size_t i = 0; i < scene.gts.size(); ++i) {
      const GroundTruth& g = scene.gts[i];
      const double d2 = center_distance_sq(a, g);
      if (d2 < nearest_d2) {
        nearest_d2 = d2;
        nearest = i;
      }
      const double half_size = 0.5 * std::sqrt(g.box.area());
      auto& cd = class_dist[static_cast<std::size_t>(g.class_id)];
      cd = std::min(cd, std::sqrt(d2) / half_size);
    }

    const double n0 = box_rng.normal();
    const double n1 = box_rng.normal();
    const double n2 = box_rng.normal();
    const double n3 = box_rng.normal();
    BoxXYXY base;
    double sigma = 0.0;
    if (scene.gts.empty()) {
      const double half = 0.5 * a.stride;
      base = {a.cx - half, a.cy - half, a.cx + half, a.cy + half};
      sigma = spec.pred_noise * a.stride;
    } else {
      const GroundTruth& g = scene.gts[nearest];
      base = g.box;
      sigma = spec.pred_noise * (std::sqrt(g.box.area()) + std::sqrt(nearest_d2));
    }
    const double xa = std::clamp(base.x1 + sigma * n0, 0.0, img_w);
    const double ya = std::clamp(base.y1 + sigma * n1, 0.0, img_h);
    const double xb = std::clamp(base.x2 + sigma * n2, 0.0, img_w);
    const double yb = std::clamp(base.y2 + sigma * n3, 0.0, img_h);
    scene.preds.boxes[j] = {std::min(xa, xb), std::min(ya, yb), std::max(xa, xb), std::max(ya, yb)};

    const auto scores = scene.preds.cls_scores.row(j);
    for (std::size_t c = 0; c < classes; ++c) {
      const double clean = class_dist[c] == inf ? 0.0 : sigmoid(spec.score_sharpness * (1.0 - class_dist[c]));
      scores[c] = std::clamp(clean + kScoreNoise * score_rng.normal(), 0.0, 1.0);
    }
  }
  return scene;
}

std::vector<Scene> generate_batch(const SceneSpec& spec, int count) {
  if (count < 1) throw Error(Errc::kInvalidSpec, "batch count must be >= 1");
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  SceneSpec s = spec;
  for (int i = 0; i < count; ++i) {
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    scenes.push_back(generate(s));
  }
  return scenes;
}

double mean_pairwise_gt_iou(const Scene& scene) {
  const std::size_t m = scene.gts.size();
  if (m < 2) return 0.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      total += iou(scene.gts[a].box, scene.gts[b].box);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace ota
