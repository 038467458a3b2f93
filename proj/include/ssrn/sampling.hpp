#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ssrn::sampling {

/// How the K siamese offsets are placed inside one stride.
enum class OffsetMode {
  adjacent,  // delta_k = k
  spread,    // delta_k = floor(k * stride / (K + 1))
};

/// Sparse sampling of M anchor frames (plus K shifted siamese sequences) out of
/// T dense frames.
struct SamplingPlan {
  std::size_t dense_frames = 0;   // T
  std::size_t sampled = 0;        // M
  std::size_t siamese = 0;        // K
  double stride = 0.0;            // T / M
  std::vector<std::size_t> offsets;  // delta_1..delta_K, each in [1, max(1, floor(stride))]

  /// Validates T >= M >= 2 and derives stride and offsets.
  static SamplingPlan make(std::size_t dense_frames, std::size_t sampled, std::size_t siamese,
                           OffsetMode mode = OffsetMode::adjacent);
};

/// Ground-truth segment in dense-frame units.
struct BoundaryAnnotation {
  double start = 0.0;
  double end = 0.0;
};

/// Labels on the sampled grid. Hard indices are floor(soft) clamped to M-1;
/// offsets satisfy hard_start + 1 - offset_start = soft_start and
/// hard_end - 1 + offset_end = soft_end.
struct BoundaryLabels {
  std::size_t hard_start = 0;
  std::size_t hard_end = 0;
  double soft_start = 0.0;
  double soft_end = 0.0;
  double offset_start = 1.0;  // in [0, 1]
  double offset_end = 1.0;    // in [1, 2)
};

/// a_i = floor(i * T / M).
std::vector<std::size_t> anchor_indices(const SamplingPlan& plan);

/// min(a_i + delta_k, T - 1) for 1 <= k <= K.
std::vector<std::size_t> siamese_indices(const SamplingPlan& plan, std::size_t k);

BoundaryLabels map_boundary(const BoundaryAnnotation& ann, const SamplingPlan& plan);

/// Grid position back to dense-frame time: idx / M * T. Accepts idx in [0, M].
double unmap_index(double idx, const SamplingPlan& plan);

struct PlannedAnnotation {
  BoundaryAnnotation annotation;
  SamplingPlan plan;
};

struct BiasReport {
  std::vector<double> ious;  // per annotation, hard round trip vs original
  double mean_iou = 0.0;
  double min_iou = 0.0;
  double max_drift = 0.0;   // dense-frame units
  double mean_drift = 0.0;  // averaged over both boundaries of every annotation
  std::array<std::size_t, 10> histogram{};  // IoU buckets [0,0.1) ... [0.9,1.0]
};

BiasReport bias_report(std::span<const BoundaryAnnotation> annotations, const SamplingPlan& plan);
BiasReport bias_report(std::span<const PlannedAnnotation> annotations);

}  // namespace ssrn::sampling
