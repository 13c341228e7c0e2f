#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ota/assigner.hpp"
#include "ota/scene_sim.hpp"

namespace ota {

// Hand-crafted stand-ins for ATSS/PAA-style assigners: each gt claims its
// center-prior candidates and overlapping claims are settled by a fixed rule.
enum class Baseline {
  kTopkMaxIou,  // contested anchor goes to the gt with the highest predicted-box IoU
  kMinArea,     // contested anchor goes to the smallest gt
};

const char* baseline_name(Baseline b) noexcept;

struct BaselineResult {
  std::vector<int> labels;  // gt index or m for background
  int fg_count = 0;
  // Anchors claimed by two or more gts before conflicts are resolved.
  int ambiguous_count = 0;
};

BaselineResult baseline_assign(const Scene& scene, int r, Baseline rule);

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

struct BenchRow {
  std::string method;
  int r = 0;
  std::string k_mode;  // "dynamic", "fixed" or "-"
  int k = 0;
  int q = 0;
  double gamma = 0.0;
  int iters = 0;
  int scenes = 0;
  double mean_amb = kNotMeasured;
  double mean_fg = kNotMeasured;
  double mean_gap = kNotMeasured;
  double median_ms = kNotMeasured;
  // Sidecar-only statistics.
  double mean_per_gt_positives = kNotMeasured;
  double mean_supply = kNotMeasured;
  double mean_iterations = kNotMeasured;
  double per_iteration_ms = kNotMeasured;
};

struct BenchReport {
  std::string sweep;  // "r", "k" or "throughput"
  std::vector<BenchRow> rows;
  std::vector<std::string> notes;
};

struct SweepOptions {
  SceneSpec spec;
  int scenes = 20;
  OtaConfig ota;
  // k-sweep only: how many reduced scenes feed the exact-oracle gap column.
  int oracle_scenes = 5;
};

// One row per (method, r). OTA rows count anchors whose plan maximum is below
// the ambiguity threshold; baseline rows count pre-resolution double claims.
BenchReport run_r_sweep(const SweepOptions& opts, std::span<const int> r_values,
                        std::span<const Baseline> baselines);

// One fixed-k row per k, plus a dynamic-k row when requested. mean_gap is
// objective(plan) - exact optimum on reduced copies of the scenes.
BenchReport run_k_sweep(const SweepOptions& opts, std::span<const int> k_values, bool include_dynamic);

// Median wall time of solve() on random (m+1) x n costs in [0,5].
BenchReport run_throughput(int m, int n, double gamma, int iters, int repeats, std::uint64_t seed = 0);

// Reduced variant used for oracle gaps: 128x128 image, strides {16,32,64}.
SceneSpec oracle_scale_spec(const SceneSpec& spec);

inline constexpr const char* kCsvHeader =
    "method,r,k_mode,k,q,gamma,iters,scenes,mean_amb,mean_fg,mean_gap,median_ms";

void write_csv(std::ostream& os, const BenchReport& report);

}  // namespace ota
