#pragma once

#include <cstddef>
#include <vector>

#include "ssrn/numcore/graph.hpp"

namespace ssrn::train {

struct AdamState {
  std::vector<num::Matrix> first;   // m
  std::vector<num::Matrix> second;  // v
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const ad::ParamStore& params);
};

/// Bias-corrected Adam update, applied in place.
void adam_step(ad::ParamStore& params, const ad::Gradients& grads, AdamState& state, double lr);

}  // namespace ssrn::train
