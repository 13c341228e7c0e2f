#include "ota/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ota/error.hpp"

namespace ota {

void SinkhornConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::kInvalidArgument, "gamma must be > 0");
  if (iters < 1) throw Error(Errc::kInvalidArgument, "iters must be >= 1");
  if (!(residual_tol >= 0.0)) throw Error(Errc::kInvalidArgument, "residual_tol must be >= 0");
}

namespace {

constexpr double kDenominatorFloor = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(const CostMatrix& cost, const SupplyDemand& sd) {
  const std::size_t rows = cost.values.rows();
  const std::size_t n = cost.n();
  if (rows == 0 || n == 0) throw Error(Errc::kInvalidArgument, "cost matrix is empty");
  if (sd.supply.size() != rows || sd.demand.size() != n) {
    throw Error(Errc::kInvalidArgument, "supply/demand shape does not match cost matrix");
  }
  for (double c : cost.values.data()) {
    if (!std::isfinite(c)) throw Error(Errc::kNonfiniteInput, "cost matrix contains NaN or Inf");
  }
  double total_s = 0.0;
  double total_d = 0.0;
  for (double s : sd.supply) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(Errc::kInvalidArgument, "supply must be finite and >= 0");
    total_s += s;
  }
  for (double d : sd.demand) {
    if (!(d > 0.0) || !std::isfinite(d)) throw Error(Errc::kInvalidArgument, "demand must be finite and > 0");
    total_d += d;
  }
  if (std::abs(total_s - total_d) > 1e-9 * std::max(1.0, total_d)) {
    throw Error(Errc::kUnbalanced, "total supply " + std::to_string(total_s) +
                                       " != total demand " + std::to_string(total_d));
  }
}

double checked_denominator(double denom, const char* which, std::size_t index) {
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw Error(Errc::kNumericUnderflow,
                std::string("degenerate ") + which + " scaling denominator at index " +
                    std::to_string(index) + "; retry in the log domain");
  }
  return std::max(denom, kDenominatorFloor);
}

TransportPlan solve_linear(const CostMatrix& cost, const SupplyDemand& sd, const SinkhornConfig& cfg) {
  const std::size_t rows = cost.values.rows();
  const std::size_t n = cost.n();
  const double inv_gamma = 1.0 / cfg.gamma;

  MatrixD kernel(rows, n);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto c = cost.values.row(i);
    const auto k = kernel.row(i);
    for (std::size_t j = 0; j < n; ++j) k[j] = std::exp(-c[j] * inv_gamma);
  }

  std::vector<double> u(n, 1.0);
  std::vector<double> v(rows, 1.0);
  std::vector<double> col(n);
  int t = 0;
  for (; t < cfg.iters; ++t) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const auto k = kernel.row(i);
      for (std::size_t j = 0; j < n; ++j) col[j] += k[j] * vi;
    }
    if (cfg.residual_tol > 0.0 && t > 0) {
      double resid = 0.0;
      for (std::size_t j = 0; j < n; ++j) resid += std::abs(u[j] * col[j] - sd.demand[j]);
      if (resid <= cfg.residual_tol) break;
    }
    for (std::size_t j = 0; j < n; ++j) u[j] = sd.demand[j] / checked_denominator(col[j], "column", j);

    for (std::size_t i = 0; i < rows; ++i) {
      if (sd.supply[i] == 0.0) {
        v[i] = 0.0;
        continue;
      }
      const auto k = kernel.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += k[j] * u[j];
      v[i] = sd.supply[i] / checked_denominator(acc, "row", i);
    }
  }

  TransportPlan out;
  out.plan = MatrixD(rows, n);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto k = kernel.row(i);
    const auto p = out.plan.row(i);
    for (std::size_t j = 0; j < n; ++j) p[j] = v[i] * k[j] * u[j];
  }
  out.log_u.resize(n);
  out.log_v.resize(rows);
  std::transform(u.begin(), u.end(), out.log_u.begin(), [](double x) { return std::log(x); });
  std::transform(v.begin(), v.end(), out.log_v.begin(), [](double x) { return std::log(x); });
  out.u = std::move(u);
  out.v = std::move(v);
  out.iterations_run = t;
  out.log_domain = false;
  return out;
}

// Column-wise log-sum-exp of log_kernel(i,j) + weights[i], two passes over the
// rows (max, then shifted sum) so memory is always read row-contiguously.
void column_lse(const MatrixD& log_kernel, const std::vector<double>& weights,
                std::vector<double>& maxes, std::vector<double>& out) {
  const std::size_t rows = log_kernel.rows();
  const std::size_t n = log_kernel.cols();
  std::fill(maxes.begin(), maxes.end(), kNegInf);
  for (std::size_t i = 0; i < rows; ++i) {
    if (weights[i] == kNegInf) continue;
    const auto lk = log_kernel.row(i);
    for (std::size_t j = 0; j < n; ++j) maxes[j] = std::max(maxes[j], lk[j] + weights[i]);
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (weights[i] == kNegInf) continue;
    const auto lk = log_kernel.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (maxes[j] != kNegInf) out[j] += std::exp(lk[j] + weights[i] - maxes[j]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = maxes[j] == kNegInf ? kNegInf : maxes[j] + std::log(out[j]);
  }
}

double row_lse(std::span<const double> log_kernel_row, const std::vector<double>& weights) {
  double mx = kNegInf;
  for (std::size_t j = 0; j < log_kernel_row.size(); ++j) mx = std::max(mx, log_kernel_row[j] + weights[j]);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t j = 0; j < log_kernel_row.size(); ++j) acc += std::exp(log_kernel_row[j] + weights[j] - mx);
  return mx + std::log(acc);
}

TransportPlan solve_log(const CostMatrix& cost, const SupplyDemand& sd, const SinkhornConfig& cfg) {
  const std::size_t rows = cost.values.rows();
  const std::size_t n = cost.n();
  const double inv_gamma = 1.0 / cfg.gamma;

  MatrixD log_kernel(rows, n);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto c = cost.values.row(i);
    const auto lk = log_kernel.row(i);
    for (std::size_t j = 0; j < n; ++j) lk[j] = -c[j] * inv_gamma;
  }
  std::vector<double> log_s(rows);
  std::vector<double> log_d(n);
  std::transform(sd.supply.begin(), sd.supply.end(), log_s.begin(), [](double x) { return std::log(x); });
  std::transform(sd.demand.begin(), sd.demand.end(), log_d.begin(), [](double x) { return std::log(x); });

  std::vector<double> log_u(n, 0.0);
  std::vector<double> log_v(rows, 0.0);
  std::vector<double> maxes(n);
  std::vector<double> lse(n);
  int t = 0;
  for (; t < cfg.iters; ++t) {
    column_lse(log_kernel, log_v, maxes, lse);
    if (cfg.residual_tol > 0.0 && t > 0) {
      double resid = 0.0;
      for (std::size_t j = 0; j < n; ++j) resid += std::abs(std::exp(log_u[j] + lse[j]) - sd.demand[j]);
      if (resid <= cfg.residual_tol) break;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (lse[j] == kNegInf) {
        throw Error(Errc::kNumericUnderflow,
                    "column " + std::to_string(j) + " receives no mass from any supplier");
      }
      log_u[j] = log_d[j] - lse[j];
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (sd.supply[i] == 0.0) {
        log_v[i] = kNegInf;
        continue;
      }
      const double r = row_lse(log_kernel.row(i), log_u);
      if (r == kNegInf) {
        throw Error(Errc::kNumericUnderflow,
                    "row " + std::to_string(i) + " can reach no demander");
      }
      log_v[i] = log_s[i] - r;
    }
  }

  TransportPlan out;
  out.plan = MatrixD(rows, n);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto lk = log_kernel.row(i);
    const auto p = out.plan.row(i);
    for (std::size_t j = 0; j < n; ++j) p[j] = std::exp(log_v[i] + lk[j] + log_u[j]);
  }
  out.u.resize(n);
  out.v.resize(rows);
  std::transform(log_u.begin(), log_u.end(), out.u.begin(), [](double x) { return std::exp(x); });
  std::transform(log_v.begin(), log_v.end(), out.v.begin(), [](double x) { return std::exp(x); });
  out.log_u = std::move(log_u);
  out.log_v = std::move(log_v);
  out.iterations_run = t;
  out.log_domain = true;
  return out;
}

}  // namespace

TransportPlan solve(const CostMatrix& cost, const SupplyDemand& sd, const SinkhornConfig& cfg) {
  cfg.validate();
  check_inputs(cost, sd);

  bool use_log = cfg.log_domain;
  if (!use_log) {
    const auto data = cost.values.data();
    const double min_cost = *std::min_element(data.begin(), data.end());
    use_log = min_cost / cfg.gamma > kLogDomainThreshold;
  }
  TransportPlan out = use_log ? solve_log(cost, sd, cfg) : solve_linear(cost, sd, cfg);
  out.marginal_residual = marginal_residual(out.plan, sd);
  return out;
}

TransportPlan solve_with_fallback(const CostMatrix& cost, const SupplyDemand& sd, SinkhornConfig cfg) {
  try {
    return solve(cost, sd, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::kNumericUnderflow || cfg.log_domain) throw;
  }
  cfg.log_domain = true;
  return solve(cost, sd, cfg);
}

double objective(const CostMatrix& cost, const MatrixD& plan) {
  if (plan.rows() != cost.values.rows() || plan.cols() != cost.n()) {
    throw Error(Errc::kInvalidArgument, "plan shape does not match cost matrix");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    const auto c = cost.values.row(i);
    const auto p = plan.row(i);
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      if (p[j] != 0.0) total += c[j] * p[j];
    }
  }
  return total;
}

double marginal_residual(const MatrixD& plan, const SupplyDemand& sd) {
  const std::size_t rows = plan.rows();
  const std::size_t n = plan.cols();
  if (sd.supply.size() != rows || sd.demand.size() != n) {
    throw Error(Errc::kInvalidArgument, "plan shape does not match supply/demand");
  }
  if (n == 0) return 0.0;
  std::vector<double> col(n, 0.0);
  double row_dev = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto p = plan.row(i);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_sum += p[j];
      col[j] += p[j];
    }
    row_dev += std::abs(row_sum - sd.supply[i]);
  }
  double col_dev = 0.0;
  for (std::size_t j = 0; j < n; ++j) col_dev += std::abs(col[j] - sd.demand[j]);
  return std::max(row_dev, col_dev) / static_cast<double>(n);
}

}  // namespace ota
