#include "ssrn/training/pipeline_check.hpp"

#include "ssrn/numcore/random.hpp"
#include "ssrn/training/model.hpp"

namespace ssrn::train {

ad::GradReport pipeline_grad_check(std::uint64_t seed, const PipelineCheckShape& shape, ad::GradCheckOptions options) {
  num::Rng rng(seed);
  RawSample raw;
  raw.id = "grad-check";
  raw.frames = num::random_normal(shape.dense_frames, shape.feature_dim, rng);
  raw.query = num::random_normal(shape.tokens, shape.feature_dim, rng);
  const double T = static_cast<double>(shape.dense_frames);
  const double a = rng.uniform(0.05, 0.45) * T;
  const double b = rng.uniform(0.55, 0.95) * T;
  raw.annotation = {a, b};
  const GroundingSample sample = make_sample(raw, shape.sampled, shape.siamese);

  ModelConfig config;
  config.video_dim = shape.feature_dim;
  config.query_dim = shape.feature_dim;
  config.dim = shape.dim;
  config.sampled = shape.sampled;
  config.siamese = shape.siamese;
  config.use_siamese = shape.siamese > 0;
  SsrnModel model = SsrnModel::create(config, seed ^ 0x5eedULL);
  const double lambda = shape.lambda;
  return ad::grad_check([&](ad::Graph& g) { return model.loss(g, sample, lambda).total; }, model.params(), options);
}

}  // namespace ssrn::train
