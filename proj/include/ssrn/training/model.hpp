#pragma once

#include <cstdint>
#include <optional>

#include "ssrn/encoders.hpp"
#include "ssrn/heads.hpp"
#include "ssrn/interaction.hpp"
#include "ssrn/siamese.hpp"
#include "ssrn/training/config.hpp"
#include "ssrn/training/data.hpp"

namespace ssrn::train {

struct ForwardResult {
  heads::SpanLogits logits;
  ad::Var offsets;                  // M×2
  ad::Var fused;                    // F~^a, M×D
  std::optional<ad::Var> affinity;  // C, M×K, absent without siamese streams
};

/// The full grounding network: encoders, co-attention, siamese reasoning and
/// span/offset heads, with all weights in one ParamStore.
class SsrnModel {
 public:
  static SsrnModel create(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }

  /// Builds the forward pass of one sample on `g`, which must be bound to params().
  ForwardResult forward(ad::Graph& g, const GroundingSample& sample) const;

  /// Forward plus losses (lambda applied to L2).
  heads::LossTerms loss(ad::Graph& g, const GroundingSample& sample, double lambda) const;

  /// Raises ShapeError when the sample does not fit this network.
  void check_sample(const GroundingSample& sample) const;

 private:
  ModelConfig config_;
  ad::ParamStore params_;
  enc::EncoderParams video_encoder_;
  enc::EncoderParams query_encoder_;
  interaction::InteractionParams interaction_;
  siamese::SiameseParams siamese_;
  heads::SpanPredictorParams heads_;
};

}  // namespace ssrn::train
