#pragma once

#include <cstdint>
#include <vector>

#include "ota/geometry.hpp"

namespace ota {

// Synthetic stand-in for a detector's outputs on one image.
struct SceneSpec {
  std::uint64_t seed = 0;
  int image_w = 640;
  int image_h = 640;
  std::vector<int> strides{8, 16, 32, 64, 128};
  int num_gts = 5;
  double crowding = 0.3;  // 0: boxes in disjoint cells, 1: one overlapping cluster
  int num_classes = 2;
  double pred_noise = 0.1;  // box jitter, relative to gt size plus anchor distance
  double score_sharpness = 4.0;
  // Box side range as a fraction of the shorter image side.
  double min_box_frac = 0.08;
  double max_box_frac = 0.3;

  void validate() const;  // throws Error(kInvalidSpec)
};

// Philox stream ids; each part of the scene draws from its own stream so that
// adding anchors never perturbs the gt layout.
inline constexpr std::uint32_t kGtStream = 1;
inline constexpr std::uint32_t kBoxStream = 2;
inline constexpr std::uint32_t kScoreStream = 3;

// Ground truths:
//   * grid of g x g cells, g = ceil(sqrt(num_gts)); gts take cells in a seeded
//     random order and every box is shrunk to fit inside 0.95 of its cell;
//   * each gt also draws a cluster position around a shared image-central
//     point, and its center is lerp(cell position, cluster position, crowding).
// Predictions for anchor j, whose nearest gt (lowest index on ties) has size
// s = sqrt(w*h) at center distance d:
//   * box = that gt's corners + N(0, pred_noise * (s + d)) each, reordered and
//     clipped to the image;
//   * score for class c = sigmoid(sharpness * (1 - d_c / (s_c/2))) + N(0, 0.02),
//     clamped to [0,1], where d_c is the distance to the nearest gt of class c
//     (score is pure noise when class c has no gt).
Scene generate(const SceneSpec& spec);

// Scene i uses seed spec.seed + i.
std::vector<Scene> generate_batch(const SceneSpec& spec, int count);

// Mean IoU over all unordered gt pairs; 0 when fewer than two gts.
double mean_pairwise_gt_iou(const Scene& scene);

}  // namespace ota
