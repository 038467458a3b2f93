#pragma once

#include <cmath>
#include <string>

#include <doctest.h>

#include "ssrn/numcore/grad_check.hpp"
#include "ssrn/numcore/graph.hpp"
#include "ssrn/numcore/ops.hpp"
#include "ssrn/numcore/random.hpp"

namespace testing {

using ssrn::num::Matrix;

inline Matrix randn(std::size_t r, std::size_t c, ssrn::num::Rng& rng, double scale = 1.0) {
  return ssrn::num::random_normal(r, c, rng, scale);
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Contracts `out` with a fixed random weight so every output element gets a
/// distinct upstream gradient.
inline ssrn::ad::Var probe(ssrn::ad::Graph& g, ssrn::ad::Var out, std::uint64_t seed) {
  ssrn::num::Rng rng(seed);
  const auto w = g.constant(randn(out.rows(), out.cols(), rng));
  return ssrn::ad::sum_all(ssrn::ad::mul(out, w));
}

inline void require_grad_ok(const ssrn::ad::LossBuilder& build, ssrn::ad::ParamStore& store) {
  const auto report = ssrn::ad::grad_check(build, store);
  INFO("worst " << report.worst_param() << " err " << report.max_rel_error() << " " << report.failure);
  CHECK(report.passed);
  CHECK(report.max_rel_error() <= 1e-3);
}

}  // namespace testing
