#include "ssrn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssrn/errors.hpp"
#include "ssrn/interval.hpp"

namespace ssrn::sampling {

SamplingPlan SamplingPlan::make(std::size_t dense_frames, std::size_t sampled, std::size_t siamese,
                                OffsetMode mode) {
  if (sampled < 2 || dense_frames < sampled)
    throw ValidationError("SamplingPlan: need T >= M >= 2, got T=" + std::to_string(dense_frames) +
                          " M=" + std::to_string(sampled));
  SamplingPlan plan;
  plan.dense_frames = dense_frames;
  plan.sampled = sampled;
  plan.siamese = siamese;
  plan.stride = static_cast<double>(dense_frames) / static_cast<double>(sampled);
  const std::size_t max_offset = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(plan.stride)));
  for (std::size_t k = 1; k <= siamese; ++k) {
    std::size_t delta = k;
    if (mode == OffsetMode::spread)
      delta = static_cast<std::size_t>(std::floor(static_cast<double>(k) * plan.stride /
                                                  static_cast<double>(siamese + 1)));
    plan.offsets.push_back(std::clamp<std::size_t>(delta, 1, max_offset));
  }
  return plan;
}

std::vector<std::size_t> anchor_indices(const SamplingPlan& plan) {
  std::vector<std::size_t> idx(plan.sampled);
  for (std::size_t i = 0; i < plan.sampled; ++i) idx[i] = i * plan.dense_frames / plan.sampled;
  return idx;
}

std::vector<std::size_t> siamese_indices(const SamplingPlan& plan, std::size_t k) {
  if (k < 1 || k > plan.siamese)
    throw IndexError("siamese_indices: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(plan.siamese) + "]");
  auto idx = anchor_indices(plan);
  const std::size_t delta = plan.offsets[k - 1];
  for (auto& i : idx) i = std::min(i + delta, plan.dense_frames - 1);
  return idx;
}

BoundaryLabels map_boundary(const BoundaryAnnotation& ann, const SamplingPlan& plan) {
  const double T = static_cast<double>(plan.dense_frames);
  const double M = static_cast<double>(plan.sampled);
  if (!(ann.start >= 0.0 && ann.start <= ann.end && ann.end <= T))
    throw ValidationError("map_boundary: need 0 <= start <= end <= T, got start=" +
                          std::to_string(ann.start) + " end=" + std::to_string(ann.end) +
                          " T=" + std::to_string(plan.dense_frames));
  const auto last = plan.sampled - 1;
  BoundaryLabels out;
  out.soft_start = ann.start * M / T;
  out.soft_end = ann.end * M / T;
  out.hard_start = std::min(static_cast<std::size_t>(std::floor(out.soft_start)), last);
  out.hard_end = std::min(static_cast<std::size_t>(std::floor(out.soft_end)), last);
  if (out.hard_start > out.hard_end) out.hard_end = out.hard_start;
  out.offset_start = static_cast<double>(out.hard_start) + 1.0 - out.soft_start;
  out.offset_end = out.soft_end - static_cast<double>(out.hard_end) + 1.0;
  // soft_end == M lands on the clamped last index; keep the target inside [1, 2).
  constexpr double kEndCap = 2.0 - 1e-9;
  out.offset_end = std::min(out.offset_end, kEndCap);
  return out;
}

double unmap_index(double idx, const SamplingPlan& plan) {
  const double M = static_cast<double>(plan.sampled);
  if (!(idx >= 0.0 && idx <= M))
    throw ValidationError("unmap_index: index " + std::to_string(idx) + " outside [0, " +
                          std::to_string(plan.sampled) + "]");
  return idx / M * static_cast<double>(plan.dense_frames);
}

BiasReport bias_report(std::span<const BoundaryAnnotation> annotations, const SamplingPlan& plan) {
  std::vector<PlannedAnnotation> planned;
  planned.reserve(annotations.size());
  for (const auto& a : annotations) planned.push_back({a, plan});
  return bias_report(planned);
}

BiasReport bias_report(std::span<const PlannedAnnotation> annotations) {
  if (annotations.empty()) throw ValidationError("bias_report: empty annotation list");
  BiasReport r;
  r.min_iou = 1.0;
  double iou_sum = 0.0, drift_sum = 0.0;
  for (const auto& pa : annotations) {
    const auto labels = map_boundary(pa.annotation, pa.plan);
    const Interval truth{pa.annotation.start, pa.annotation.end};
    const Interval rounded{unmap_index(static_cast<double>(labels.hard_start), pa.plan),
                           unmap_index(static_cast<double>(labels.hard_end), pa.plan)};
    const double v = iou(truth, rounded);
    r.ious.push_back(v);
    iou_sum += v;
    r.min_iou = std::min(r.min_iou, v);
    const double ds = std::abs(truth.start - rounded.start);
    const double de = std::abs(truth.end - rounded.end);
    r.max_drift = std::max({r.max_drift, ds, de});
    drift_sum += ds + de;
    const auto bucket = std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(v * 10.0)));
    ++r.histogram[bucket];
  }
  const double n = static_cast<double>(annotations.size());
  r.mean_iou = iou_sum / n;
  r.mean_drift = drift_sum / (2.0 * n);
  return r;
}

}  // namespace ssrn::sampling
