#pragma once

#include <span>

#include "ota/geometry.hpp"

namespace ota {

enum class RegMode { kIouLog, kGiou };

struct LossConfig {
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  // Clamp for probabilities before logs and floor for IoU inside -log(IoU).
  double iou_eps = 1e-6;
  RegMode reg_mode = RegMode::kIouLog;

  void validate() const;
};

// Target value meaning "every class is negative".
inline constexpr int kBackground = -1;

// Sum over classes of per-class binary focal terms. `target_class` is a class
// index or kBackground.
double focal_cls_cost(std::span<const double> scores, int target_class, const LossConfig& cfg);

// IOU_LOG: -ln(max(IoU, eps)). GIOU: 1 - GIoU, in [0, 2].
double reg_cost(const BoxXYXY& pred, const BoxXYXY& gt, const LossConfig& cfg);

}  // namespace ota
