#pragma once

#include <cstddef>
#include <vector>

#include "ota/cost_builder.hpp"
#include "ota/geometry.hpp"
#include "ota/losses.hpp"
#include "ota/sinkhorn.hpp"

namespace ota {

// Anchors whose largest received mass falls below this are ambiguous.
inline constexpr double kAmbiguityThreshold = 0.9;

struct AssignmentResult {
  std::vector<int> labels;  // gt index, or m for background
  int fg_count = 0;
  std::vector<int> per_gt_positives;
  std::vector<bool> ambiguous_flags;
  int ambiguous_count = 0;
  std::vector<double> plan_max;

  // Solver diagnostics; zero when the solver was skipped.
  double marginal_residual = 0.0;
  int iterations = 0;
  bool log_domain = false;

  std::size_t background() const noexcept { return per_gt_positives.size(); }
};

// Per-anchor argmax over the plan column. Foreground rows win exact ties
// against background, and among foreground rows the lowest gt index wins.
AssignmentResult decode(const TransportPlan& plan);

struct OtaConfig {
  LossConfig loss;
  CenterPriorConfig center_prior;
  SupplyConfig supply;
  SinkhornConfig sinkhorn;
  double alpha = 1.5;  // regression weight in the foreground cost
};

// Intermediate artifacts of one assignment, for dumping and diagnostics.
// cost/supply/plan are empty when the scene has no ground truths.
struct OtaRun {
  CostMatrix cost;
  SupplyDemand supply;
  TransportPlan plan;
  AssignmentResult result;
};

// Cost matrix, supply estimate, Sinkhorn, decode. A scene without ground
// truths is labelled all-background without running the solver.
OtaRun run_ota_detailed(const Scene& scene, const OtaConfig& cfg);

AssignmentResult run_ota(const Scene& scene, const OtaConfig& cfg);

}  // namespace ota
