#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ssrn/heads.hpp"
#include "ssrn/interval.hpp"

namespace ssrn::train {

using ssrn::iou;

/// Percentage of samples where any of the first n predictions has IoU >= m with
/// the truth. Raises ValidationError on misaligned inputs.
double recall_at(std::span<const std::vector<Interval>> predictions, std::span<const Interval> truths,
                 std::size_t n, double m);

inline constexpr std::array<std::size_t, 2> kRecallRanks{1, 5};
inline constexpr std::array<double, 3> kRecallIous{0.3, 0.5, 0.7};

struct MetricsReport {
  std::size_t samples = 0;
  bool refined = true;  // which decode the headline table uses
  /// recall[r][t]: R@kRecallRanks[r], IoU=kRecallIous[t], in percent.
  std::array<std::array<double, 3>, 2> recall{};
  std::array<std::array<double, 3>, 2> recall_hard{};
  std::array<std::array<double, 3>, 2> recall_refined{};
  double mean_iou = 0.0;              // top-1, headline decode
  double mean_error_hard = 0.0;       // dense-frame units, top-1
  double mean_error_refined = 0.0;
  std::size_t clamped = 0;            // refinements that crossed over

  double r_at(std::size_t n, double m) const;
};

/// Scores finalized top-n predictions (from heads::finalize) against truths in
/// dense-frame units. `plans` gives each sample's grid for the hard decode.
MetricsReport score_predictions(std::span<const std::vector<heads::SegmentPrediction>> predictions,
                                std::span<const Interval> truths,
                                std::span<const sampling::SamplingPlan> plans, bool refined = true);

}  // namespace ssrn::train
