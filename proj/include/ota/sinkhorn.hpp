#pragma once

#include <vector>

#include "ota/cost_builder.hpp"
#include "ota/matrix.hpp"

namespace ota {

struct SinkhornConfig {
  double gamma = 0.1;  // entropic regularization intensity
  int iters = 50;
  // Force the log-domain solver. When false the linear solver is used unless
  // every entry of cost/gamma exceeds kLogDomainThreshold.
  bool log_domain = false;
  // Stop early once the unnormalized L1 column-marginal residual falls to this
  // value. 0 runs exactly `iters` rounds.
  double residual_tol = 0.0;

  void validate() const;
};

inline constexpr double kLogDomainThreshold = 500.0;

// plan(i,j) = v[i] * exp(-c(i,j)/gamma) * u[j]. log_u/log_v are kept alongside
// u/v because in the log domain the scalings can leave the double range.
struct TransportPlan {
  MatrixD plan;
  std::vector<double> u;      // one per anchor (column)
  std::vector<double> v;      // one per supplier (row)
  std::vector<double> log_u;
  std::vector<double> log_v;
  int iterations_run = 0;
  double marginal_residual = 0.0;
  bool log_domain = false;
};

// Sinkhorn-Knopp scaling from all-ones u, v. Each round updates u from v, then
// v from the new u. Deterministic for identical inputs.
// Throws NONFINITE_INPUT, UNBALANCED, and NUMERIC_UNDERFLOW (linear domain only;
// retry with log_domain = true).
TransportPlan solve(const CostMatrix& cost, const SupplyDemand& sd, const SinkhornConfig& cfg);

// solve(), retried in the log domain on NUMERIC_UNDERFLOW.
TransportPlan solve_with_fallback(const CostMatrix& cost, const SupplyDemand& sd,
                                  SinkhornConfig cfg);

// Sum of c(i,j) * plan(i,j).
double objective(const CostMatrix& cost, const MatrixD& plan);

// max(L1 row-sum deviation from supply, L1 column-sum deviation from demand) / n.
double marginal_residual(const MatrixD& plan, const SupplyDemand& sd);

}  // namespace ota
