#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ssrn/numcore/graph.hpp"

namespace ssrn::ad {

struct ParamCheck {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_element = 0;
  double analytic = 0.0;   // at worst_element
  double numeric = 0.0;    // at worst_element
};

struct GradReport {
  std::vector<ParamCheck> params;
  double eps = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Set when a perturbed evaluation was not finite.
  std::string failure;

  double max_rel_error() const;
  /// Name of the parameter with the largest error, or empty.
  std::string worst_param() const;
};

/// Builds a scalar loss on the given graph, reading parameters via Graph::param.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckOptions {
  double eps = 1e-5;
  double tolerance = 1e-3;
};

/// Compares reverse-mode gradients with central differences on every parameter
/// element. relative error = |ad - fd| / max(1, |ad|, |fd|).
GradReport grad_check(const LossBuilder& build, ParamStore& params, GradCheckOptions options = {});

double relative_error(double analytic, double numeric);

}  // namespace ssrn::ad
