#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "ssrn/numcore/graph.hpp"
#include "ssrn/numcore/random.hpp"

namespace ssrn::siamese {

/// How anchor/siamese affinities are formed.
enum class AggregationMode {
  cosine,   // softmax over k of cos(F^a_i, F^{s,k}_i)
  average,  // uniform 1/K
};

/// How aggregated siamese knowledge enters the anchor stream.
enum class ReasoningMode {
  residual,  // alpha * sum_k C(:,k) * (F^{s,k} W1) + (1 - alpha) * F^a W2
  concat,    // [F^a ; sum_k C(:,k) * F^{s,k}] Wcat
};

struct SiameseParams {
  std::string w1;
  std::string w2;
  std::string wcat;  // 2D×D, only registered for ReasoningMode::concat
  double alpha = 0.5;
  std::size_t dim = 0;
  AggregationMode aggregation = AggregationMode::cosine;
  ReasoningMode reasoning = ReasoningMode::residual;

  static SiameseParams create(ad::ParamStore& store, const std::string& prefix, std::size_t dim,
                              double alpha, num::Rng& rng,
                              AggregationMode aggregation = AggregationMode::cosine,
                              ReasoningMode reasoning = ReasoningMode::residual);
};

/// M×K row-stochastic affinity matrix C. Raises ValidationError for K = 0.
ad::Var aggregate(ad::Graph& g, ad::Var anchor, std::span<const ad::Var> siamese,
                  AggregationMode mode = AggregationMode::cosine);

/// Injects siamese knowledge into the anchor features; M×D.
ad::Var reason(ad::Graph& g, ad::Var anchor, std::span<const ad::Var> siamese, ad::Var affinity,
               const SiameseParams& p);

/// Anchor-only path used when siamese sampling is disabled: F^a W2.
ad::Var anchor_only(ad::Graph& g, ad::Var anchor, const SiameseParams& p);

}  // namespace ssrn::siamese
