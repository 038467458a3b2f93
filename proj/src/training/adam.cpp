#include "ssrn/training/adam.hpp"

#include <cmath>

#include "ssrn/errors.hpp"

namespace ssrn::train {

AdamState AdamState::for_params(const ad::ParamStore& params) {
  AdamState s;
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.first.emplace_back(params.value(i).rows(), params.value(i).cols());
    s.second.emplace_back(params.value(i).rows(), params.value(i).cols());
  }
  return s;
}

void adam_step(ad::ParamStore& params, const ad::Gradients& grads, AdamState& state, double lr) {
  if (grads.slots.size() != params.size() || state.first.size() != params.size() ||
      state.second.size() != params.size())
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                     std::to_string(grads.slots.size()) + " gradients, " +
                     std::to_string(state.first.size()) + " moment slots");
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& g = grads.slots[p];
    if (!g.same_shape(params.value(p)) || !state.first[p].same_shape(g) || !state.second[p].same_shape(g))
      throw ShapeError("adam_step: parameter '" + params.name(p) + "' is " + params.value(p).shape_string() +
                       ", gradient " + g.shape_string());
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto w = params.value(p).data();
    auto m = state.first[p].data();
    auto v = state.second[p].data();
    auto g = grads.slots[p].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.eps);
    }
  }
}

}  // namespace ssrn::train
