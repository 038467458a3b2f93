#include "ssrn/training/metrics.hpp"

#include <cmath>
#include <string>

#include "ssrn/errors.hpp"

namespace ssrn::train {

double recall_at(std::span<const std::vector<Interval>> predictions, std::span<const Interval> truths,
                 std::size_t n, double m) {
  if (predictions.size() != truths.size())
    throw ValidationError("recall_at: " + std::to_string(predictions.size()) + " prediction lists for " +
                          std::to_string(truths.size()) + " truths");
  if (truths.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const std::size_t upto = std::min(n, predictions[i].size());
    for (std::size_t r = 0; r < upto; ++r) {
      if (iou(predictions[i][r], truths[i]) >= m) {
        ++hits;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truths.size());
}

double MetricsReport::r_at(std::size_t n, double m) const {
  for (std::size_t r = 0; r < kRecallRanks.size(); ++r)
    for (std::size_t t = 0; t < kRecallIous.size(); ++t)
      if (kRecallRanks[r] == n && std::abs(kRecallIous[t] - m) < 1e-12) return recall[r][t];
  throw IndexError("MetricsReport: no R@" + std::to_string(n) + ", IoU=" + std::to_string(m));
}

MetricsReport score_predictions(std::span<const std::vector<heads::SegmentPrediction>> predictions,
                                std::span<const Interval> truths,
                                std::span<const sampling::SamplingPlan> plans, bool refined) {
  if (predictions.size() != truths.size() || plans.size() != truths.size())
    throw ValidationError("score_predictions: " + std::to_string(predictions.size()) + " predictions, " +
                          std::to_string(truths.size()) + " truths, " + std::to_string(plans.size()) +
                          " plans");
  MetricsReport r;
  r.samples = truths.size();
  r.refined = refined;
  std::vector<std::vector<Interval>> hard(truths.size()), soft(truths.size());
  double iou_sum = 0.0, err_hard = 0.0, err_soft = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    for (const auto& p : predictions[i]) {
      hard[i].push_back({sampling::unmap_index(static_cast<double>(p.hard_start), plans[i]),
                         sampling::unmap_index(static_cast<double>(p.hard_end), plans[i])});
      soft[i].push_back({p.time_start, p.time_end});
      if (p.clamped) ++r.clamped;
    }
    if (predictions[i].empty()) continue;
    const Interval& th = hard[i].front();
    const Interval& ts = soft[i].front();
    err_hard += 0.5 * (std::abs(th.start - truths[i].start) + std::abs(th.end - truths[i].end));
    err_soft += 0.5 * (std::abs(ts.start - truths[i].start) + std::abs(ts.end - truths[i].end));
    iou_sum += iou(refined ? ts : th, truths[i]);
  }
  for (std::size_t a = 0; a < kRecallRanks.size(); ++a) {
    for (std::size_t t = 0; t < kRecallIous.size(); ++t) {
      r.recall_hard[a][t] = recall_at(hard, truths, kRecallRanks[a], kRecallIous[t]);
      r.recall_refined[a][t] = recall_at(soft, truths, kRecallRanks[a], kRecallIous[t]);
    }
  }
  r.recall = refined ? r.recall_refined : r.recall_hard;
  if (r.samples > 0) {
    const double n = static_cast<double>(r.samples);
    r.mean_iou = iou_sum / n;
    r.mean_error_hard = err_hard / n;
    r.mean_error_refined = err_soft / n;
  }
  return r;
}

}  // namespace ssrn::train
