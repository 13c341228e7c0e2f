#include "ota/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ota/error.hpp"
#include "ota/oracle.hpp"
#include "ota/philox.hpp"

namespace ota {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> xs) {
  if (xs.empty()) return kNotMeasured;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

BenchRow ota_row(const OtaConfig& cfg, int scenes) {
  BenchRow row;
  row.method = "OTA";
  row.r = cfg.center_prior.r;
  row.k_mode = cfg.supply.mode == SupplyMode::kDynamicK ? "dynamic" : "fixed";
  row.k = cfg.supply.mode == SupplyMode::kFixedK ? cfg.supply.k : 0;
  row.q = cfg.supply.mode == SupplyMode::kDynamicK ? cfg.supply.q : 0;
  row.gamma = cfg.sinkhorn.gamma;
  row.iters = cfg.sinkhorn.iters;
  row.scenes = scenes;
  return row;
}

// Assigns every scene with OTA and fills the per-scene means.
void measure_ota(const std::vector<Scene>& scenes, const OtaConfig& cfg, BenchRow& row) {
  double amb = 0.0, fg = 0.0, per_gt = 0.0, supply = 0.0, iters = 0.0;
  std::size_t gt_total = 0;
  std::vector<double> times;
  for (const Scene& scene : scenes) {
    const auto start = Clock::now();
    const OtaRun run = run_ota_detailed(scene, cfg);
    times.push_back(elapsed_ms(start));
    amb += run.result.ambiguous_count;
    fg += run.result.fg_count;
    iters += run.result.iterations;
    for (std::size_t i = 0; i < run.result.per_gt_positives.size(); ++i) {
      per_gt += run.result.per_gt_positives[i];
      supply += run.supply.supply[i];
    }
    gt_total += scene.num_gts();
  }
  const double count = static_cast<double>(scenes.size());
  row.mean_amb = amb / count;
  row.mean_fg = fg / count;
  row.mean_iterations = iters / count;
  if (gt_total > 0) {
    row.mean_per_gt_positives = per_gt / static_cast<double>(gt_total);
    row.mean_supply = supply / static_cast<double>(gt_total);
  }
  row.median_ms = median(std::move(times));
}

double oracle_gap(const std::vector<Scene>& small, const OtaConfig& cfg) {
  double total = 0.0;
  int counted = 0;
  for (const Scene& scene : small) {
    if (scene.num_gts() == 0) continue;
    const OtaRun run = run_ota_detailed(scene, cfg);
    const ExactSolution exact = solve_exact(run.cost, run.supply);
    total += objective(run.cost, run.plan.plan) - exact.cost;
    ++counted;
  }
  return counted == 0 ? kNotMeasured : total / counted;
}

void format_value(std::ostream& os, double x) {
  if (std::isnan(x)) return;  // empty field means "not measured"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  os << buf;
}

}  // namespace

const char* baseline_name(Baseline b) noexcept {
  switch (b) {
    case Baseline::kTopkMaxIou: return "TOPK_MAXIOU";
    case Baseline::kMinArea: return "MIN_AREA";
  }
  return "UNKNOWN";
}

BaselineResult baseline_assign(const Scene& scene, int r, Baseline rule) {
  const std::size_t m = scene.num_gts();
  const std::size_t n = scene.num_anchors();
  BaselineResult out;
  out.labels.assign(n, static_cast<int>(m));
  if (m == 0) return out;
  const Mask mask = center_prior_mask(scene.anchors, scene.gts, r);
  for (std::size_t j = 0; j < n; ++j) {
    int claims = 0;
    int winner = -1;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!mask(i, j)) continue;
      ++claims;
      // Larger key wins; ties keep the lower gt index.
      const double key = rule == Baseline::kTopkMaxIou ? iou(scene.preds.boxes[j], scene.gts[i].box)
                                                       : -scene.gts[i].box.area();
      if (winner < 0 || key > best) {
        winner = static_cast<int>(i);
        best = key;
      }
    }
    if (claims >= 2) ++out.ambiguous_count;
    if (winner >= 0) {
      out.labels[j] = winner;
      ++out.fg_count;
    }
  }
  return out;
}

SceneSpec oracle_scale_spec(const SceneSpec& spec) {
  SceneSpec small = spec;
  small.image_w = 128;
  small.image_h = 128;
  small.strides = {16, 32, 64};
  small.num_gts = std::min(spec.num_gts, 3);
  return small;
}

BenchReport run_r_sweep(const SweepOptions& opts, std::span<const int> r_values,
                        std::span<const Baseline> baselines) {
  if (r_values.empty()) throw Error(Errc::kInvalidArgument, "r sweep needs at least one value");
  const std::vector<Scene> scenes = generate_batch(opts.spec, opts.scenes);
  BenchReport report;
  report.sweep = "r";
  report.notes.push_back(
      "Predictions are synthetic (scene simulator), not outputs of a trained detector; "
      "only trends across r are meaningful.");
  report.notes.push_back(
      "Baseline rows count anchors claimed by >= 2 gts before conflict resolution.");
  for (int r : r_values) {
    OtaConfig cfg = opts.ota;
    cfg.center_prior.r = r;
    BenchRow row = ota_row(cfg, opts.scenes);
    measure_ota(scenes, cfg, row);
    report.rows.push_back(row);

    for (Baseline b : baselines) {
      BenchRow brow;
      brow.method = baseline_name(b);
      brow.r = r;
      brow.k_mode = "-";
      brow.scenes = opts.scenes;
      double amb = 0.0, fg = 0.0;
      std::vector<double> times;
      for (const Scene& scene : scenes) {
        const auto start = Clock::now();
        const BaselineResult res = baseline_assign(scene, r, b);
        times.push_back(elapsed_ms(start));
        amb += res.ambiguous_count;
        fg += res.fg_count;
      }
      brow.mean_amb = amb / opts.scenes;
      brow.mean_fg = fg / opts.scenes;
      brow.median_ms = median(std::move(times));
      report.rows.push_back(brow);
    }
  }
  return report;
}

BenchReport run_k_sweep(const SweepOptions& opts, std::span<const int> k_values, bool include_dynamic) {
  if (k_values.empty() && !include_dynamic) {
    throw Error(Errc::kInvalidArgument, "k sweep needs at least one value");
  }
  const std::vector<Scene> scenes = generate_batch(opts.spec, opts.scenes);
  std::vector<Scene> small;
  if (opts.oracle_scenes > 0) small = generate_batch(oracle_scale_spec(opts.spec), opts.oracle_scenes);

  BenchReport report;
  report.sweep = "k";
  report.notes.push_back(
      "Predictions are synthetic (scene simulator), not outputs of a trained detector.");
  report.notes.push_back(
      "mean_gap = objective(Sinkhorn plan) - exact optimum on reduced 128x128 scenes.");

  std::vector<OtaConfig> configs;
  for (int k : k_values) {
    OtaConfig cfg = opts.ota;
    cfg.supply.mode = SupplyMode::kFixedK;
    cfg.supply.k = k;
    configs.push_back(cfg);
  }
  if (include_dynamic) {
    OtaConfig cfg = opts.ota;
    cfg.supply.mode = SupplyMode::kDynamicK;
    configs.push_back(cfg);
  }
  for (const OtaConfig& cfg : configs) {
    BenchRow row = ota_row(cfg, opts.scenes);
    measure_ota(scenes, cfg, row);
    if (!small.empty()) row.mean_gap = oracle_gap(small, cfg);
    report.rows.push_back(row);
  }
  return report;
}

BenchReport run_throughput(int m, int n, double gamma, int iters, int repeats, std::uint64_t seed) {
  if (repeats < 3) throw Error(Errc::kInvalidArgument, "throughput needs repeats >= 3");
  if (m < 0 || n < 1) throw Error(Errc::kInvalidArgument, "throughput needs m >= 0 and n >= 1");
  const auto rows = static_cast<std::size_t>(m) + 1;
  const auto cols = static_cast<std::size_t>(n);

  CounterRng rng(seed, 0);
  MatrixD values(rows, cols);
  for (double& c : values.data()) c = 5.0 * rng.uniform();
  const CostMatrix cost(std::move(values));
  const int k = std::max(1, std::min(10, (n - 1) / std::max(1, m + 1)));
  const SupplyDemand sd = make_supply(std::vector<long long>(static_cast<std::size_t>(m), k), cols);
  SinkhornConfig cfg;
  cfg.gamma = gamma;
  cfg.iters = iters;

  std::vector<double> times;
  int iterations = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    const auto start = Clock::now();
    const TransportPlan plan = solve(cost, sd, cfg);
    times.push_back(elapsed_ms(start));
    iterations = plan.iterations_run;
  }

  BenchReport report;
  report.sweep = "throughput";
  report.notes.push_back("m=" + std::to_string(m) + " n=" + std::to_string(n) +
                         " random costs in [0,5], single-threaded solve()");
  BenchRow row;
  row.method = "SINKHORN";
  row.k_mode = "fixed";
  row.k = k;
  row.gamma = gamma;
  row.iters = iters;
  row.scenes = repeats;
  row.median_ms = median(std::move(times));
  row.mean_iterations = iterations;
  row.per_iteration_ms = row.median_ms / std::max(1, iterations);
  report.rows.push_back(row);
  return report;
}

void write_csv(std::ostream& os, const BenchReport& report) {
  os << kCsvHeader << '\n';
  for (const BenchRow& r : report.rows) {
    os << r.method << ',' << r.r << ',' << r.k_mode << ',' << r.k << ',' << r.q << ',';
    format_value(os, r.gamma);
    os << ',' << r.iters << ',' << r.scenes << ',';
    format_value(os, r.mean_amb);
    os << ',';
    format_value(os, r.mean_fg);
    os << ',';
    format_value(os, r.mean_gap);
    os << ',';
    format_value(os, r.median_ms);
    os << '\n';
  }
}

}  // namespace ota
