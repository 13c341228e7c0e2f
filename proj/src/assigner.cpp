#include "ota/assigner.hpp"

#include "ota/error.hpp"

namespace ota {

AssignmentResult decode(const TransportPlan& tp) {
  const MatrixD& plan = tp.plan;
  if (plan.rows() == 0) throw Error(Errc::kInvalidArgument, "plan has no background row");
  const std::size_t m = plan.rows() - 1;
  const std::size_t n = plan.cols();

  AssignmentResult out;
  out.labels.assign(n, static_cast<int>(m));
  out.per_gt_positives.assign(m, 0);
  out.ambiguous_flags.assign(n, false);
  out.plan_max.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    double best_mass = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (plan(i, j) > best_mass) {
        best_mass = plan(i, j);
        best = i;
      }
    }
    if (m == 0 || plan(m, j) > best_mass) {
      best = m;
      best_mass = plan(m, j);
    }
    out.labels[j] = static_cast<int>(best);
    out.plan_max[j] = best_mass;
    if (best < m) {
      ++out.per_gt_positives[best];
      ++out.fg_count;
    }
    if (best_mass < kAmbiguityThreshold) {
      out.ambiguous_flags[j] = true;
      ++out.ambiguous_count;
    }
  }
  out.marginal_residual = tp.marginal_residual;
  out.iterations = tp.iterations_run;
  out.log_domain = tp.log_domain;
  return out;
}

OtaRun run_ota_detailed(const Scene& scene, const OtaConfig& cfg) {
  validate_scene(scene);
  OtaRun run;
  const std::size_t n = scene.num_anchors();
  if (scene.num_gts() == 0) {
    run.result.labels.assign(n, 0);
    run.result.ambiguous_flags.assign(n, false);
    run.result.plan_max.assign(n, 1.0);
    return run;
  }
  run.cost = build_cost(scene, cfg.loss, cfg.center_prior, cfg.alpha);
  run.supply = estimate_supply(scene, cfg.supply);
  run.plan = solve_with_fallback(run.cost, run.supply, cfg.sinkhorn);
  run.result = decode(run.plan);
  return run;
}

AssignmentResult run_ota(const Scene& scene, const OtaConfig& cfg) {
  return run_ota_detailed(scene, cfg).result;
}

}  // namespace ota
