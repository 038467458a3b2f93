#pragma once

#include <cstddef>
#include <cstdint>

#include "ssrn/numcore/grad_check.hpp"

namespace ssrn::train {

struct PipelineCheckShape {
  std::size_t sampled = 6;     // M
  std::size_t tokens = 4;      // N
  std::size_t dim = 8;         // D
  std::size_t siamese = 2;     // K
  std::size_t dense_frames = 23;
  std::size_t feature_dim = 5;
  double lambda = 1.0;
};

/// Gradient check of L1 + lambda*L2 through encoders, co-attention, siamese
/// reasoning and both heads on one random sample with fixed labels.
ad::GradReport pipeline_grad_check(std::uint64_t seed, const PipelineCheckShape& shape = {},
                                   ad::GradCheckOptions options = {});

}  // namespace ssrn::train
