#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ssrn/training/adam.hpp"
#include "ssrn/training/metrics.hpp"
#include "ssrn/training/model.hpp"

namespace ssrn::train {

struct StepLog {
  std::size_t step = 0;
  double total = 0.0;  // batch means
  double l1 = 0.0;
  double l2 = 0.0;
};

struct TrainOutcome {
  SsrnModel model;
  AdamState adam;
  std::vector<StepLog> log;
  std::vector<std::pair<std::size_t, MetricsReport>> evaluations;
};

/// Mean gradient over a batch. Per-sample gradients may be computed on several
/// threads but are always summed in batch order.
ad::Gradients batch_gradients(const SsrnModel& model, std::span<const GroundingSample* const> batch,
                              double lambda, std::size_t threads, heads::LossBundle* mean_loss = nullptr);

/// Adam on L1 + lambda * L2 (lambda forced to 0 when soft labels are off) for
/// config.max_steps steps. `eval_set` is scored every config.eval_every steps.
TrainOutcome train(const TrainConfig& config, std::span<const GroundingSample> train_set,
                   std::span<const GroundingSample> eval_set = {},
                   const std::function<void(const StepLog&)>& on_step = {});

/// Top-n decoded, refined and unmapped predictions for one sample.
std::vector<heads::SegmentPrediction> predict(const SsrnModel& model, const GroundingSample& sample,
                                              std::size_t top_n = 5);

/// Decodes top-5 for every sample and scores it. `refined` picks the headline decode.
MetricsReport evaluate(const SsrnModel& model, std::span<const GroundingSample> samples, bool refined = true);

/// Mean losses over a sample set with the current weights.
heads::LossBundle mean_loss(const SsrnModel& model, std::span<const GroundingSample> samples, double lambda);

}  // namespace ssrn::train
