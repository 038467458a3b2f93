#pragma once

#include <cstddef>
#include <string>

#include "ssrn/encoders.hpp"

namespace ssrn::interaction {

/// Co-attention weights shared by the anchor and every siamese stream.
struct InteractionParams {
  std::string ws;           // D×D query projection
  enc::BiGruParams fusion;  // 4D -> D
  std::size_t dim = 0;

  static InteractionParams create(ad::ParamStore& store, const std::string& prefix, std::size_t dim,
                                  num::Rng& rng, std::size_t layers = 1);
};

struct CoAttention {
  ad::Var a;  // M×D, S_r (Q Ws)
  ad::Var b;  // M×D, S_r S_c^T V
};

/// S = V (Q Ws)^T, M×N.
ad::Var similarity(ad::Graph& g, const InteractionParams& p, ad::Var video, ad::Var query);

/// S_r is the row softmax of S over words, S_c the column softmax over frames.
CoAttention coattend(ad::Graph& g, const InteractionParams& p, ad::Var video, ad::Var query, ad::Var s);

/// Bi-GRU over [V; A; V*A; V*B], giving M×D query-guided features.
ad::Var fuse(ad::Graph& g, const InteractionParams& p, ad::Var video, const CoAttention& att);

/// similarity -> coattend -> fuse for one stream.
ad::Var interact(ad::Graph& g, const InteractionParams& p, ad::Var video, ad::Var query);

}  // namespace ssrn::interaction
