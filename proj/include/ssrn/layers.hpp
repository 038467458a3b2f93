#pragma once

#include <cstddef>
#include <string>

#include "ssrn/numcore/graph.hpp"
#include "ssrn/numcore/random.hpp"

namespace ssrn {

/// Glorot-uniform initialisation.
num::Matrix xavier(std::size_t rows, std::size_t cols, num::Rng& rng);

/// Affine map x W + b. Parameters live in the store under "<prefix>.w" and "<prefix>.b".
struct LinearParams {
  std::string prefix;
  std::size_t in = 0;
  std::size_t out = 0;

  static LinearParams create(ad::ParamStore& store, std::string prefix, std::size_t in,
                             std::size_t out, num::Rng& rng);
  ad::Var forward(ad::Graph& g, ad::Var x) const;
  std::string weight() const { return prefix + ".w"; }
  std::string bias() const { return prefix + ".b"; }
};

}  // namespace ssrn
