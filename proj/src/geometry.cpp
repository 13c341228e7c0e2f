#include "ota/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ota/error.hpp"

namespace ota {

bool BoxXYXY::valid() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 <= x2 && y1 <= y2;
}

namespace {

double intersection_area(const BoxXYXY& a, const BoxXYXY& b) noexcept {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

}  // namespace

double iou(const BoxXYXY& a, const BoxXYXY& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double giou(const BoxXYXY& a, const BoxXYXY& b) noexcept {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  const double enclose = (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) *
                         (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
  if (enclose <= 0.0) return 0.0;
  const double ratio = uni > 0.0 ? inter / uni : 0.0;
  return ratio - (enclose - uni) / enclose;
}

double center_distance_sq(const Anchor& anchor, const GroundTruth& gt) noexcept {
  const double dx = anchor.cx - gt.box.center_x();
  const double dy = anchor.cy - gt.box.center_y();
  return dx * dx + dy * dy;
}

double center_distance(const Anchor& anchor, const GroundTruth& gt) noexcept {
  return std::hypot(anchor.cx - gt.box.center_x(), anchor.cy - gt.box.center_y());
}

std::vector<Anchor> make_anchor_grid(int image_w, int image_h, std::span<const int> strides) {
  std::vector<Anchor> anchors;
  for (std::size_t level = 0; level < strides.size(); ++level) {
    const int s = strides[level];
    if (s <= 0) throw Error(Errc::kInvalidArgument, "stride must be positive");
    const int nx = (image_w + s - 1) / s;
    const int ny = (image_h + s - 1) / s;
    anchors.reserve(anchors.size() + static_cast<std::size_t>(nx) * ny);
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        anchors.push_back({x * s + 0.5 * s, y * s + 0.5 * s, static_cast<int>(level), s});
      }
    }
  }
  return anchors;
}

void validate_scene(const Scene& scene) {
  auto fail = [](const std::string& msg) { throw Error(Errc::kInvalidArgument, msg); };
  if (scene.image_w <= 0 || scene.image_h <= 0) fail("image dimensions must be positive");
  const std::size_t n = scene.anchors.size();
  if (scene.preds.boxes.size() != n) fail("prediction box count does not match anchor count");
  if (scene.preds.cls_scores.rows() != n) fail("score row count does not match anchor count");
  const int levels = static_cast<int>(scene.strides.size());
  for (const Anchor& a : scene.anchors) {
    if (a.stride <= 0) fail("anchor stride must be positive");
    if (levels > 0 && (a.level < 0 || a.level >= levels)) fail("anchor level out of range");
    if (!std::isfinite(a.cx) || !std::isfinite(a.cy)) fail("anchor center is not finite");
  }
  for (double p : scene.preds.cls_scores.data()) {
    if (!(p >= 0.0 && p <= 1.0)) fail("class score outside [0,1]");
  }
  for (const BoxXYXY& b : scene.preds.boxes) {
    if (!b.valid()) fail("invalid predicted box");
  }
  const auto classes = static_cast<int>(scene.num_classes());
  for (const GroundTruth& g : scene.gts) {
    if (!g.box.valid() || g.box.area() <= 0.0) fail("ground-truth box must have positive area");
    if (g.class_id < 0 || (n > 0 && g.class_id >= classes)) fail("ground-truth class out of range");
    if (g.box.x1 < 0.0 || g.box.y1 < 0.0 || g.box.x2 > scene.image_w || g.box.y2 > scene.image_h) {
      fail("ground-truth box outside image bounds");
    }
  }
}

}  // namespace ota
