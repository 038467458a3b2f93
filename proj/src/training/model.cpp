#include "ssrn/training/model.hpp"

#include <vector>

#include "ssrn/errors.hpp"

namespace ssrn::train {

SsrnModel SsrnModel::create(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  SsrnModel m;
  m.config_ = config;
  num::Rng rng(seed);
  const std::size_t D = config.dim;
  m.video_encoder_ = enc::EncoderParams::create(m.params_, "video_enc", config.video_dim, D, rng, config.rnn_layers);
  m.query_encoder_ = enc::EncoderParams::create(m.params_, "query_enc", config.query_dim, D, rng, config.rnn_layers);
  m.interaction_ = interaction::InteractionParams::create(m.params_, "interaction", D, rng, config.rnn_layers);
  m.siamese_ = siamese::SiameseParams::create(m.params_, "siamese", D, config.alpha, rng, config.aggregation,
                                              config.reasoning);
  m.heads_ = heads::SpanPredictorParams::create(m.params_, "heads", D, D, rng);
  return m;
}

void SsrnModel::check_sample(const GroundingSample& sample) const {
  const auto M = config_.sampled;
  if (sample.anchor.rows() != M || sample.anchor.cols() != config_.video_dim)
    throw ShapeError("sample '" + sample.id + "': anchor " + sample.anchor.shape_string() +
                     " does not match model M=" + std::to_string(M) + " video_dim=" +
                     std::to_string(config_.video_dim));
  if (sample.siamese.size() < config_.active_siamese())
    throw ShapeError("sample '" + sample.id + "': " + std::to_string(sample.siamese.size()) +
                     " siamese streams, model needs K=" + std::to_string(config_.active_siamese()));
  for (const auto& s : sample.siamese)
    if (!s.same_shape(sample.anchor))
      throw ShapeError("sample '" + sample.id + "': siamese stream " + s.shape_string() +
                       " differs from anchor " + sample.anchor.shape_string());
  if (sample.query.rows() == 0 || sample.query.cols() != config_.query_dim)
    throw ShapeError("sample '" + sample.id + "': query " + sample.query.shape_string() +
                     " does not match query_dim=" + std::to_string(config_.query_dim));
}

ForwardResult SsrnModel::forward(ad::Graph& g, const GroundingSample& sample) const {
  check_sample(sample);
  const ad::Var q = enc::encode_query(g, query_encoder_, g.constant(sample.query));
  const ad::Var fa = interaction::interact(g, interaction_,
                                          enc::encode_video(g, video_encoder_, g.constant(sample.anchor)), q);
  ForwardResult out;
  const std::size_t K = config_.active_siamese();
  if (K == 0) {
    out.fused = siamese::anchor_only(g, fa, siamese_);
  } else {
    std::vector<ad::Var> streams;
    streams.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
      streams.push_back(interaction::interact(
          g, interaction_, enc::encode_video(g, video_encoder_, g.constant(sample.siamese[k])), q));
    const ad::Var c = siamese::aggregate(g, fa, streams, config_.aggregation);
    out.affinity = c;
    out.fused = siamese::reason(g, fa, streams, c, siamese_);
  }
  out.logits = heads::span_logits(g, out.fused, heads_);
  out.offsets = heads::offset_scores(g, out.fused, heads_);
  return out;
}

heads::LossTerms SsrnModel::loss(ad::Graph& g, const GroundingSample& sample, double lambda) const {
  const ForwardResult f = forward(g, sample);
  return heads::compute_losses(f.logits, f.offsets, sample.labels, lambda);
}

}  // namespace ssrn::train
