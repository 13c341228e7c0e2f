#include "ota/cost_builder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "ota/error.hpp"

namespace ota {

Mask center_prior_mask(std::span<const Anchor> anchors, std::span<const GroundTruth> gts, int r) {
  if (r < 1) throw Error(Errc::kInvalidArgument, "center prior radius r must be >= 1");
  const std::size_t n = anchors.size();
  Mask mask(gts.size(), n, 0);

  // Anchor indices grouped by level, in ascending index order.
  int max_level = -1;
  for (const Anchor& a : anchors) max_level = std::max(max_level, a.level);
  std::vector<std::vector<std::size_t>> by_level(static_cast<std::size_t>(max_level + 1));
  for (std::size_t j = 0; j < n; ++j) by_level[anchors[j].level].push_back(j);

  const std::size_t per_level = static_cast<std::size_t>(r) * static_cast<std::size_t>(r);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    for (const auto& level : by_level) {
      if (level.size() <= per_level) {
        for (std::size_t j : level) mask(i, j) = 1;
        continue;
      }
      ranked.clear();
      for (std::size_t j : level) ranked.emplace_back(center_distance_sq(anchors[j], gts[i]), j);
      std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(per_level) - 1,
                       ranked.end());
      for (std::size_t t = 0; t < per_level; ++t) mask(i, ranked[t].second) = 1;
    }
  }
  return mask;
}

CostMatrix build_cost(const Scene& scene, const LossConfig& loss_cfg,
                      const CenterPriorConfig& cp_cfg, double alpha) {
  const std::size_t m = scene.num_gts();
  const std::size_t n = scene.num_anchors();
  if (m == 0) throw Error(Errc::kEmptyScene, "scene has no ground truths");
  loss_cfg.validate();
  if (!(cp_cfg.penalty >= 0.0) || !std::isfinite(cp_cfg.penalty)) {
    throw Error(Errc::kInvalidArgument, "center prior penalty must be finite and >= 0");
  }

  const Mask mask = center_prior_mask(scene.anchors, scene.gts, cp_cfg.r);
  MatrixD c(m + 1, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto scores = scene.preds.cls_scores.row(j);
    const BoxXYXY& pred = scene.preds.boxes[j];
    for (std::size_t i = 0; i < m; ++i) {
      const GroundTruth& gt = scene.gts[i];
      double cost = focal_cls_cost(scores, gt.class_id, loss_cfg) +
                    alpha * reg_cost(pred, gt.box, loss_cfg);
      if (!mask(i, j)) cost += cp_cfg.penalty;
      c(i, j) = cost;
    }
    c(m, j) = focal_cls_cost(scores, kBackground, loss_cfg);
  }
  return CostMatrix(std::move(c));
}

SupplyDemand make_supply(std::vector<long long> fg, std::size_t n) {
  const auto total = [&fg] { return std::accumulate(fg.begin(), fg.end(), 0LL); };
  const auto n_ll = static_cast<long long>(n);
  const auto m_ll = static_cast<long long>(fg.size());

  if (long long sum = total(); sum >= n_ll && !fg.empty()) {
    const double scale = static_cast<double>(n_ll - m_ll) / static_cast<double>(sum);
    for (long long& s : fg) {
      s = std::max(1LL, static_cast<long long>(std::floor(static_cast<double>(s) * scale)));
    }
    if (total() >= n_ll) {
      throw Error(Errc::kSupplyOverflow, "positive supplies exhaust all " + std::to_string(n) +
                                             " anchors for " + std::to_string(fg.size()) + " gts");
    }
  }

  SupplyDemand sd;
  sd.supply.reserve(fg.size() + 1);
  for (long long s : fg) sd.supply.push_back(static_cast<double>(s));
  sd.supply.push_back(static_cast<double>(n_ll - total()));
  sd.demand.assign(n, 1.0);
  return sd;
}

SupplyDemand estimate_supply(const Scene& scene, const SupplyConfig& cfg) {
  const std::size_t m = scene.num_gts();
  const std::size_t n = scene.num_anchors();
  std::vector<long long> fg(m, 0);

  switch (cfg.mode) {
    case SupplyMode::kFixedK:
      if (cfg.k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
      std::fill(fg.begin(), fg.end(), cfg.k);
      break;
    case SupplyMode::kDynamicK: {
      if (cfg.q < 1) throw Error(Errc::kInvalidArgument, "q must be >= 1");
      const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(cfg.q), n);
      std::vector<double> ious(n);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) ious[j] = iou(scene.preds.boxes[j], scene.gts[i].box);
        std::partial_sort(ious.begin(), ious.begin() + static_cast<std::ptrdiff_t>(top), ious.end(),
                          std::greater<>());
        // Summed in descending order so the result does not depend on anchor order.
        double sum = 0.0;
        for (std::size_t t = 0; t < top; ++t) sum += ious[t];
        fg[i] = std::max(1LL, static_cast<long long>(std::floor(sum)));
      }
      break;
    }
  }
  return make_supply(std::move(fg), n);
}

}  // namespace ota
