#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ota/matrix.hpp"

namespace ota {

// Axis-aligned box in continuous pixel coordinates, corner format.
struct BoxXYXY {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x1 + x2); }
  double center_y() const noexcept { return 0.5 * (y1 + y2); }
  bool valid() const noexcept;

  friend bool operator==(const BoxXYXY&, const BoxXYXY&) = default;
};

// Anchor point on one pyramid level. Anchor boxes are represented by their
// geometric center.
struct Anchor {
  double cx = 0.0;
  double cy = 0.0;
  int level = 0;
  int stride = 1;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct GroundTruth {
  BoxXYXY box;
  int class_id = 0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Post-activation per-class probabilities (one row per anchor) and the
// per-anchor regressed boxes.
struct Predictions {
  MatrixD cls_scores;
  std::vector<BoxXYXY> boxes;

  friend bool operator==(const Predictions&, const Predictions&) = default;
};

struct Scene {
  int image_w = 0;
  int image_h = 0;
  std::vector<int> strides;  // one per pyramid level; anchors regenerate from these
  std::vector<Anchor> anchors;
  std::vector<GroundTruth> gts;
  Predictions preds;
  std::uint64_t seed = 0;

  std::size_t num_anchors() const noexcept { return anchors.size(); }
  std::size_t num_gts() const noexcept { return gts.size(); }
  std::size_t num_classes() const noexcept { return preds.cls_scores.cols(); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

double iou(const BoxXYXY& a, const BoxXYXY& b) noexcept;

// Generalized IoU in [-1, 1].
double giou(const BoxXYXY& a, const BoxXYXY& b) noexcept;

double center_distance(const Anchor& anchor, const GroundTruth& gt) noexcept;

// Squared form of center_distance; used for ranking so that ties are exact.
double center_distance_sq(const Anchor& anchor, const GroundTruth& gt) noexcept;

// Anchors at stride-cell centers, level-major then row-major:
// ceil(w/s) * ceil(h/s) anchors per level.
std::vector<Anchor> make_anchor_grid(int image_w, int image_h, std::span<const int> strides);

// Throws Error(kInvalidArgument) describing the first violated invariant.
void validate_scene(const Scene& scene);

}  // namespace ota
