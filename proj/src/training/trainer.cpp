#include "ssrn/training/trainer.hpp"

#include <cmath>
#include <numeric>
#include <thread>

#include "ssrn/errors.hpp"
#include "ssrn/numcore/random.hpp"

namespace ssrn::train {

namespace {

struct SampleGrad {
  ad::Gradients grads;
  heads::LossBundle loss;
};

SampleGrad sample_gradient(const SsrnModel& model, const GroundingSample& sample, double lambda) {
  ad::Graph g(&model.params());
  const heads::LossTerms terms = model.loss(g, sample, lambda);
  g.backward(terms.total);
  return {g.param_grads(), heads::values(terms)};
}

}  // namespace

ad::Gradients batch_gradients(const SsrnModel& model, std::span<const GroundingSample* const> batch,
                              double lambda, std::size_t threads, heads::LossBundle* mean_loss) {
  if (batch.empty()) throw ValidationError("batch_gradients: empty batch");
  std::vector<SampleGrad> per_sample(batch.size());
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), batch.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) per_sample[i] = sample_gradient(model, *batch[i], lambda);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < batch.size(); i += workers)
            per_sample[i] = sample_gradient(model, *batch[i], lambda);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  ad::Gradients total = ad::Gradients::zeros_like(model.params());
  heads::LossBundle sum;
  for (const auto& s : per_sample) {
    total.accumulate(s.grads);
    sum.l1 += s.loss.l1;
    sum.l2 += s.loss.l2;
    sum.total += s.loss.total;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  total.scale(inv);
  if (mean_loss) *mean_loss = {sum.l1 * inv, sum.l2 * inv, sum.total * inv};
  return total;
}

TrainOutcome train(const TrainConfig& config, std::span<const GroundingSample> train_set,
                   std::span<const GroundingSample> eval_set,
                   const std::function<void(const StepLog&)>& on_step) {
  config.validate();
  if (train_set.empty()) throw ValidationError("train: empty training set");
  TrainOutcome out{SsrnModel::create(config.model, config.seed), {}, {}, {}};
  for (const auto& s : train_set) out.model.check_sample(s);
  out.adam = AdamState::for_params(out.model.params());
  const double lambda = config.soft_label ? config.lambda : 0.0;

  num::Rng order_rng(config.seed * 0x9e3779b97f4a7c15ULL + 1);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::vector<const GroundingSample*> batch;

  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    batch.clear();
    while (batch.size() < config.batch_size) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size() - 1; i > 0; --i)
          std::swap(order[i], order[static_cast<std::size_t>(order_rng.integer(0, static_cast<std::int64_t>(i)))]);
        cursor = 0;
      }
      batch.push_back(&train_set[order[cursor++]]);
    }
    heads::LossBundle loss;
    const ad::Gradients grads = batch_gradients(out.model, batch, lambda, config.threads, &loss);
    if (!grads.all_finite() || !std::isfinite(loss.total))
      throw ContractError("train: non-finite loss or gradient at step " + std::to_string(step));
    adam_step(out.model.params(), grads, out.adam, config.learning_rate);
    out.log.push_back({step, loss.total, loss.l1, loss.l2});
    if (on_step) on_step(out.log.back());
    if (config.eval_every > 0 && !eval_set.empty() && step % config.eval_every == 0)
      out.evaluations.emplace_back(step, evaluate(out.model, eval_set, config.soft_label));
  }
  return out;
}

std::vector<heads::SegmentPrediction> predict(const SsrnModel& model, const GroundingSample& sample,
                                              std::size_t top_n) {
  ad::Graph g(&model.params());
  const ForwardResult f = model.forward(g, sample);
  auto preds = heads::decode_top_n(heads::to_distributions(f.logits), top_n);
  heads::finalize(preds, heads::to_offsets(f.offsets), sample.plan);
  return preds;
}

MetricsReport evaluate(const SsrnModel& model, std::span<const GroundingSample> samples, bool refined) {
  std::vector<std::vector<heads::SegmentPrediction>> preds;
  std::vector<Interval> truths;
  std::vector<sampling::SamplingPlan> plans;
  for (const auto& s : samples) {
    preds.push_back(predict(model, s, 5));
    truths.push_back({s.annotation.start, s.annotation.end});
    plans.push_back(s.plan);
  }
  return score_predictions(preds, truths, plans, refined);
}

heads::LossBundle mean_loss(const SsrnModel& model, std::span<const GroundingSample> samples, double lambda) {
  heads::LossBundle sum;
  for (const auto& s : samples) {
    ad::Graph g(&model.params());
    const auto v = heads::values(model.loss(g, s, lambda));
    sum.l1 += v.l1;
    sum.l2 += v.l2;
    sum.total += v.total;
  }
  const double inv = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
  return {sum.l1 * inv, sum.l2 * inv, sum.total * inv};
}

}  // namespace ssrn::train
