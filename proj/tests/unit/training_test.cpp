#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <cmath>
#include <vector>

#include "ssrn/errors.hpp"
#include "ssrn/training/pipeline_check.hpp"
#include "ssrn/training/trainer.hpp"

using namespace ssrn;
using namespace ssrn::train;
using num::Matrix;

namespace {

double naive_recall(const std::vector<std::vector<Interval>>& preds, const std::vector<Interval>& truths,
                    std::size_t n, double m) {
  int hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    bool hit = false;
    for (std::size_t r = 0; r < preds[i].size() && r < n; ++r) {
      const auto& p = preds[i][r];
      const auto& t = truths[i];
      const double inter = std::max(0.0, std::min(p.end, t.end) - std::max(p.start, t.start));
      const double uni = std::max(p.end, t.end) - std::min(p.start, t.start);
      const double v = uni > 0 ? inter / uni : (p.start == t.start ? 1.0 : 0.0);
      if (v >= m) hit = true;
    }
    hits += hit;
  }
  return 100.0 * hits / static_cast<double>(truths.size());
}

std::vector<heads::SegmentPrediction> oracle_predictions(const GroundingSample& s, bool with_offsets) {
  const std::size_t M = s.plan.sampled;
  heads::SpanDistributions d{std::vector<double>(M, 0.0), std::vector<double>(M, 0.0)};
  d.start[s.labels.hard_start] = 1.0;
  d.end[s.labels.hard_end] = 1.0;
  heads::OffsetPredictions o{std::vector<double>(M, 1.0), std::vector<double>(M, 1.0)};
  if (with_offsets) {
    o.start[s.labels.hard_start] = s.labels.offset_start;
    o.end[s.labels.hard_end] = s.labels.offset_end;
  }
  auto preds = heads::decode_top_n(d, 5);
  heads::finalize(preds, o, s.plan);
  return preds;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.model.video_dim = 6;
  c.model.query_dim = 6;
  c.model.dim = 8;
  c.model.sampled = 8;
  c.model.siamese = 2;
  c.max_steps = 6;
  c.batch_size = 3;
  c.seed = 5;
  return c;
}

std::vector<GroundingSample> tiny_samples(const TrainConfig& c, std::size_t count, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.count = count;
  spec.min_frames = 20;
  spec.max_frames = 40;
  spec.video_dim = c.model.video_dim;
  spec.query_dim = c.model.query_dim;
  spec.seed = seed;
  return make_samples(synth_dataset(spec), c.model.sampled, c.model.active_siamese(), c.model.offset_mode);
}

}  // namespace

TEST_CASE("iou and recall examples") {
  CHECK(iou({0, 10}, {5, 15}) == 1.0 / 3.0);
  const std::vector<Interval> truths{{0, 10}, {20, 30}, {0, 4}, {50, 60}};
  const std::vector<std::vector<Interval>> exact{{{0, 10}}, {{20, 30}}, {{0, 4}}, {{50, 60}}};
  CHECK(recall_at(exact, truths, 1, 0.7) == 100.0);
  const std::vector<std::vector<Interval>> half{{{0, 10}}, {{20, 29}}, {{10, 14}}, {{40, 45}}};
  CHECK(recall_at(half, truths, 1, 0.5) == 50.0);
  const std::vector<std::vector<Interval>> ranked{{{40, 41}, {40, 42}, {40, 43}, {0, 10}, {40, 44}}};
  const std::vector<Interval> one{{0, 10}};
  CHECK(recall_at(ranked, one, 5, 0.9) == 100.0);
  CHECK(recall_at(ranked, one, 3, 0.9) == 0.0);
  CHECK_THROWS_AS(recall_at(ranked, truths, 1, 0.5), ValidationError);
}

TEST_CASE("recall_at equals a naive re-implementation") {
  num::Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto count = static_cast<std::size_t>(rng.integer(1, 12));
    std::vector<Interval> truths;
    std::vector<std::vector<Interval>> preds(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = static_cast<double>(rng.integer(0, 10)), b = a + static_cast<double>(rng.integer(0, 6));
      truths.push_back({a, b});
      const auto k = rng.integer(0, 6);
      for (int r = 0; r < k; ++r) {
        const double s = static_cast<double>(rng.integer(0, 10)), e = s + static_cast<double>(rng.integer(0, 6));
        preds[i].push_back({s, e});
      }
    }
    for (std::size_t n : kRecallRanks)
      for (double m : kRecallIous) CHECK(recall_at(preds, truths, n, m) == naive_recall(preds, truths, n, m));
  }
}

TEST_CASE("adam closed forms") {
  num::Rng rng(2);
  ad::ParamStore store;
  store.add("w", testing::randn(3, 4, rng));
  const Matrix before = store.value("w");
  auto state = AdamState::for_params(store);
  ad::Gradients g = ad::Gradients::zeros_like(store);
  g.slots[0] = testing::randn(3, 4, rng);
  const double lr = 1e-3;
  adam_step(store, g, state, lr);
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double step = store.value("w")[i] - before[i];
    CHECK(std::abs(step + lr * (g.slots[0][i] > 0 ? 1.0 : -1.0)) <= 1e-6);
  }

  const Matrix after1 = store.value("w");
  const Matrix m1 = state.first[0], v1 = state.second[0];
  adam_step(store, ad::Gradients::zeros_like(store), state, lr);
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(state.first[0][i] == 0.9 * m1[i]);
    CHECK(state.second[0][i] == 0.999 * v1[i]);
  }
  CHECK(state.step == 2);
  // Zero gradient on a fresh state leaves parameters untouched.
  ad::ParamStore fresh;
  fresh.add("w", after1);
  auto fs = AdamState::for_params(fresh);
  adam_step(fresh, ad::Gradients::zeros_like(fresh), fs, lr);
  CHECK(fresh.value("w") == after1);

  ad::Gradients wrong;
  wrong.slots.push_back(Matrix(2, 2));
  CHECK_THROWS_AS(adam_step(store, wrong, state, lr), ShapeError);
}

TEST_CASE("synthetic data is deterministic and carries the query signal") {
  SyntheticSpec spec;
  spec.count = 6;
  const auto a = synth_dataset(spec), b = synth_dataset(spec);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].frames == b[i].frames);
    CHECK(a[i].query == b[i].query);
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(a[i].annotation.start == b[i].annotation.start);
    CHECK(a[i].annotation.end == b[i].annotation.end);
    CHECK(a[i].dense_frames() >= spec.min_frames);
    CHECK(a[i].dense_frames() <= spec.max_frames);
  }
  spec.seed = 2;
  CHECK_FALSE(synth_dataset(spec)[0].frames == a[0].frames);

  spec.snr = 1e6;
  spec.distractors = 0;
  for (const auto& s : synth_dataset(spec)) {
    const auto q = query_direction(s.query, spec.video_dim);
    double inside = 1e300, outside = -1e300;
    for (std::size_t t = 0; t < s.dense_frames(); ++t) {
      double dot = 0, norm = 0;
      for (std::size_t c = 0; c < spec.video_dim; ++c) {
        dot += s.frames(t, c) * q[c];
        norm += s.frames(t, c) * s.frames(t, c);
      }
      const double corr = dot / std::sqrt(norm);
      const double centre = static_cast<double>(t) + 0.5;
      if (centre >= s.annotation.start && centre <= s.annotation.end) inside = std::min(inside, corr);
      else outside = std::max(outside, corr);
    }
    CHECK(inside > outside);
  }
}

TEST_CASE("bias-stress boundaries never sit on the sampled grid") {
  auto spec = synthetic_preset("bias-stress");
  for (const auto& s : synth_dataset(spec)) {
    const double scale = static_cast<double>(spec.off_grid_sampled) / static_cast<double>(s.dense_frames());
    for (double tau : {s.annotation.start, s.annotation.end}) {
      const double x = tau * scale;
      CHECK(std::abs(x - std::round(x)) >= spec.grid_margin - 1e-12);
    }
  }
  CHECK_THROWS_AS(synthetic_preset("nope"), ValidationError);
}

TEST_CASE("oracle predictions: exact refined boundaries, hard error equals the bias drift") {
  auto spec = synthetic_preset("bias-stress");
  spec.count = 40;
  const auto samples = make_samples(synth_dataset(spec), 16, 0, sampling::OffsetMode::adjacent);
  std::vector<std::vector<heads::SegmentPrediction>> exact, neutral;
  std::vector<Interval> truths;
  std::vector<sampling::SamplingPlan> plans;
  std::vector<sampling::PlannedAnnotation> planned;
  for (const auto& s : samples) {
    exact.push_back(oracle_predictions(s, true));
    neutral.push_back(oracle_predictions(s, false));
    truths.push_back({s.annotation.start, s.annotation.end});
    plans.push_back(s.plan);
    planned.push_back({s.annotation, s.plan});
  }
  const auto r = score_predictions(exact, truths, plans, true);
  CHECK(r.r_at(1, 0.7) == 100.0);
  CHECK(r.mean_error_refined <= 1e-6);
  CHECK(r.mean_error_refined < r.mean_error_hard);
  for (const auto& row : r.recall)
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }
  const auto n = score_predictions(neutral, truths, plans, false);
  const auto bias = sampling::bias_report(planned);
  CHECK(std::abs(n.mean_error_hard - bias.mean_drift) <= 1e-9);
  CHECK(std::abs(n.mean_error_refined - bias.mean_drift) <= 1e-9);
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = TrainConfig{};
  c.learning_rate = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = TrainConfig{};
  c.model.dim = 7;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  const auto full = dataset_defaults("activitynet");
  CHECK(full.model.dim == 512);
  CHECK(full.model.siamese == 4);
  CHECK(full.model.sampled == 200);
  CHECK(full.batch_size == 64);
  CHECK(full.learning_rate == 8e-4);
  CHECK(dataset_defaults("tacos").learning_rate == 3e-4);
  CHECK(dataset_defaults("charades").model.sampled == 64);
  CHECK(dataset_defaults("charades").learning_rate == 4e-4);
  CHECK_THROWS_AS(dataset_defaults("imagenet"), ValidationError);
}

TEST_CASE("sample construction errors carry the sample id") {
  RawSample raw;
  raw.id = "clip-7";
  raw.frames = Matrix(5, 3);
  raw.query = Matrix(2, 3);
  raw.annotation = {1, 4};
  try {
    make_sample(raw, 8, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("clip-7") != std::string::npos);
    CHECK(e.kind() == "validation");
  }
  const auto c = tiny_config();
  const auto model = SsrnModel::create(c.model, 1);
  auto wrong = tiny_samples(c, 1, 3);
  wrong[0].anchor = Matrix(8, 5);
  CHECK_THROWS_AS(model.check_sample(wrong[0]), ShapeError);
}

TEST_CASE("training is finite and bit-deterministic") {
  const auto c = tiny_config();
  const auto samples = tiny_samples(c, 5, 9);
  std::vector<StepLog> log_a, log_b;
  const auto a = ssrn::train::train(c, samples, {}, [&](const StepLog& s) { log_a.push_back(s); });
  const auto b = ssrn::train::train(c, samples, {}, [&](const StepLog& s) { log_b.push_back(s); });
  REQUIRE(log_a.size() == c.max_steps);
  REQUIRE(log_b.size() == c.max_steps);
  for (std::size_t i = 0; i < log_a.size(); ++i) {
    CHECK(std::isfinite(log_a[i].total));
    CHECK(log_a[i].total == log_b[i].total);
    CHECK(log_a[i].l1 == log_b[i].l1);
    CHECK(log_a[i].l2 == log_b[i].l2);
  }
  CHECK(a.model.params() == b.model.params());
  CHECK(a.adam.step == c.max_steps);

  auto threaded = c;
  threaded.threads = 3;
  const auto t = ssrn::train::train(threaded, samples);
  CHECK(t.model.params() == a.model.params());
}

TEST_CASE("soft labels off disables the offset loss") {
  auto c = tiny_config();
  c.soft_label = false;
  const auto samples = tiny_samples(c, 4, 11);
  const auto out = ssrn::train::train(c, samples, {}, [](const StepLog& s) { CHECK(s.total == s.l1); });
  const auto m = evaluate(out.model, samples, false);
  CHECK_FALSE(m.refined);
  CHECK(m.recall == m.recall_hard);
}

TEST_CASE("ablation switches all train") {
  auto c = tiny_config();
  c.max_steps = 2;
  for (int variant = 0; variant < 4; ++variant) {
    auto v = c;
    if (variant == 1) v.model.aggregation = siamese::AggregationMode::average;
    if (variant == 2) v.model.reasoning = siamese::ReasoningMode::concat;
    if (variant == 3) v.model.use_siamese = false;
    const auto s = tiny_samples(v, 3, 12);
    const auto out = ssrn::train::train(v, s);
    CHECK(out.model.params().element_count() > 0);
    for (std::size_t i = 0; i < out.model.params().size(); ++i) CHECK(out.model.params().value(i).all_finite());
    const auto preds = predict(out.model, s[0], 5);
    CHECK(preds.size() == 5);
  }
}

TEST_CASE("full pipeline gradient check") {
  for (std::uint64_t seed : {1u, 7u}) {
    const auto report = pipeline_grad_check(seed);
    INFO(report.worst_param() << " " << report.max_rel_error());
    CHECK(report.passed);
    CHECK(report.max_rel_error() <= 1e-3);
  }
}
