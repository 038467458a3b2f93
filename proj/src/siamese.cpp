#include "ssrn/siamese.hpp"

#include <vector>

#include "ssrn/errors.hpp"
#include "ssrn/layers.hpp"
#include "ssrn/numcore/ops.hpp"

namespace ssrn::siamese {

SiameseParams SiameseParams::create(ad::ParamStore& store, const std::string& prefix, std::size_t dim,
                                    double alpha, num::Rng& rng, AggregationMode aggregation,
                                    ReasoningMode reasoning) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("SiameseParams: alpha=" + std::to_string(alpha) + " outside [0, 1]");
  SiameseParams p;
  p.w1 = prefix + ".w1";
  p.w2 = prefix + ".w2";
  p.alpha = alpha;
  p.dim = dim;
  p.aggregation = aggregation;
  p.reasoning = reasoning;
  store.add(p.w1, xavier(dim, dim, rng));
  store.add(p.w2, xavier(dim, dim, rng));
  if (reasoning == ReasoningMode::concat) {
    p.wcat = prefix + ".wcat";
    store.add(p.wcat, xavier(2 * dim, dim, rng));
  }
  return p;
}

namespace {

void check_streams(const char* op, ad::Var anchor, std::span<const ad::Var> siamese) {
  for (std::size_t k = 0; k < siamese.size(); ++k)
    if (!siamese[k].value().same_shape(anchor.value()))
      throw ShapeError(std::string(op) + ": siamese stream " + std::to_string(k + 1) + " shape " +
                       siamese[k].value().shape_string() + " differs from anchor " +
                       anchor.value().shape_string());
}

// sum_k C(:,k) * X_k
ad::Var weighted_sum(std::span<const ad::Var> streams, ad::Var affinity) {
  ad::Var acc = ad::scale_rows(streams[0], ad::slice_cols(affinity, 0, 1));
  for (std::size_t k = 1; k < streams.size(); ++k)
    acc = ad::add(acc, ad::scale_rows(streams[k], ad::slice_cols(affinity, k, 1)));
  return acc;
}

}  // namespace

ad::Var aggregate(ad::Graph& g, ad::Var anchor, std::span<const ad::Var> siamese, AggregationMode mode) {
  if (siamese.empty()) throw ValidationError("aggregate: need at least one siamese stream (K=0)");
  check_streams("aggregate", anchor, siamese);
  const std::size_t M = anchor.rows(), K = siamese.size();
  if (mode == AggregationMode::average)
    return g.constant(num::Matrix(M, K, 1.0 / static_cast<double>(K)));
  std::vector<ad::Var> cols;
  cols.reserve(K);
  for (const ad::Var& s : siamese) cols.push_back(ad::cosine_rows(anchor, s));
  return ad::softmax_rows(ad::concat_cols(cols));
}

ad::Var reason(ad::Graph& g, ad::Var anchor, std::span<const ad::Var> siamese, ad::Var affinity,
               const SiameseParams& p) {
  if (siamese.empty()) throw ValidationError("reason: need at least one siamese stream (K=0)");
  check_streams("reason", anchor, siamese);
  if (anchor.cols() != p.dim)
    throw ShapeError("reason: anchor " + anchor.value().shape_string() + " does not match D=" +
                     std::to_string(p.dim));
  if (affinity.rows() != anchor.rows() || affinity.cols() != siamese.size())
    throw ShapeError("reason: affinity " + affinity.value().shape_string() + " does not match M=" +
                     std::to_string(anchor.rows()) + " K=" + std::to_string(siamese.size()));

  if (p.reasoning == ReasoningMode::concat) {
    const ad::Var parts[] = {anchor, weighted_sum(siamese, affinity)};
    return ad::matmul(ad::concat_cols(parts), g.param(p.wcat));
  }
  const ad::Var w1 = g.param(p.w1);
  std::vector<ad::Var> projected;
  projected.reserve(siamese.size());
  for (const ad::Var& s : siamese) projected.push_back(ad::matmul(s, w1));
  const ad::Var propagated = weighted_sum(projected, affinity);
  const ad::Var residual = ad::matmul(anchor, g.param(p.w2));
  return ad::add(ad::scale(propagated, p.alpha), ad::scale(residual, 1.0 - p.alpha));
}

ad::Var anchor_only(ad::Graph& g, ad::Var anchor, const SiameseParams& p) {
  return ad::matmul(anchor, g.param(p.w2));
}

}  // namespace ssrn::siamese
