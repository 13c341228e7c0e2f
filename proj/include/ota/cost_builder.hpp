#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ota/geometry.hpp"
#include "ota/losses.hpp"
#include "ota/matrix.hpp"

namespace ota {

// (m+1) x n transport costs; the last row is the background supplier.
struct CostMatrix {
  MatrixD values;

  CostMatrix() = default;
  explicit CostMatrix(MatrixD v) : values(std::move(v)) {}

  std::size_t m() const noexcept { return values.rows() == 0 ? 0 : values.rows() - 1; }
  std::size_t n() const noexcept { return values.cols(); }
  std::size_t bg_row() const noexcept { return m(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

// Balanced supply (m+1 entries, background last) and unit demand (n entries).
struct SupplyDemand {
  std::vector<double> supply;
  std::vector<double> demand;
};

struct CenterPriorConfig {
  int r = 5;
  double penalty = 1e5;
};

enum class SupplyMode { kFixedK, kDynamicK };

struct SupplyConfig {
  SupplyMode mode = SupplyMode::kDynamicK;
  int k = 10;
  int q = 20;
};

// Entry (i,j) is set iff anchor j is one of the r*r closest anchors of its own
// level to the center of gt i. Ties at the cut go to the lower anchor index.
Mask center_prior_mask(std::span<const Anchor> anchors, std::span<const GroundTruth> gts, int r);

// Foreground rows: focal cls cost + alpha * reg cost + penalty outside the
// center prior. Background row: focal cls cost against the all-negative target.
// Throws EMPTY_SCENE when the scene has no ground truths.
CostMatrix build_cost(const Scene& scene, const LossConfig& loss_cfg,
                      const CenterPriorConfig& cp_cfg, double alpha);

// Fixed-k or dynamic-k positive supplies; background takes the remainder so
// that the supply total equals n exactly.
SupplyDemand estimate_supply(const Scene& scene, const SupplyConfig& cfg);

// Builds a balanced SupplyDemand from integral foreground supplies, applying the
// proportional clamp when they would exhaust the anchors.
SupplyDemand make_supply(std::vector<long long> fg_supply, std::size_t n);

}  // namespace ota
