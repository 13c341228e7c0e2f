#include "ota/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ota/error.hpp"

namespace ota {

void LossConfig::validate() const {
  if (!(focal_alpha > 0.0 && focal_alpha < 1.0)) {
    throw Error(Errc::kInvalidArgument, "focal_alpha must be in (0,1)");
  }
  if (!(focal_gamma >= 0.0)) throw Error(Errc::kInvalidArgument, "focal_gamma must be >= 0");
  if (!(iou_eps > 0.0 && iou_eps <= 1e-3)) {
    throw Error(Errc::kInvalidArgument, "iou_eps must be in (0, 1e-3]");
  }
}

double focal_cls_cost(std::span<const double> scores, int target_class, const LossConfig& cfg) {
  const double lo = cfg.iou_eps;
  const double hi = 1.0 - cfg.iou_eps;
  double total = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    const double p = std::clamp(scores[c], lo, hi);
    if (static_cast<int>(c) == target_class) {
      total += -cfg.focal_alpha * std::pow(1.0 - p, cfg.focal_gamma) * std::log(p);
    } else {
      total += -(1.0 - cfg.focal_alpha) * std::pow(p, cfg.focal_gamma) * std::log1p(-p);
    }
  }
  return total;
}

double reg_cost(const BoxXYXY& pred, const BoxXYXY& gt, const LossConfig& cfg) {
  switch (cfg.reg_mode) {
    case RegMode::kIouLog:
      return -std::log(std::max(iou(pred, gt), cfg.iou_eps));
    case RegMode::kGiou:
      return std::clamp(1.0 - giou(pred, gt), 0.0, 2.0);
  }
  return 0.0;
}

}  // namespace ota
