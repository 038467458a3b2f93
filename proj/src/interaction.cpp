#include "ssrn/interaction.hpp"

#include "ssrn/errors.hpp"
#include "ssrn/numcore/ops.hpp"

namespace ssrn::interaction {

InteractionParams InteractionParams::create(ad::ParamStore& store, const std::string& prefix,
                                            std::size_t dim, num::Rng& rng, std::size_t layers) {
  InteractionParams p;
  p.dim = dim;
  p.ws = prefix + ".ws";
  store.add(p.ws, xavier(dim, dim, rng));
  p.fusion = enc::BiGruParams::create(store, prefix + ".fusion", 4 * dim, dim, rng, layers);
  return p;
}

ad::Var similarity(ad::Graph& g, const InteractionParams& p, ad::Var video, ad::Var query) {
  if (video.cols() != p.dim || query.cols() != p.dim)
    throw ShapeError("similarity: video " + video.value().shape_string() + " and query " +
                     query.value().shape_string() + " must both have D=" + std::to_string(p.dim));
  const ad::Var projected = ad::matmul(query, g.param(p.ws));
  return ad::matmul(video, ad::transpose(projected));
}

CoAttention coattend(ad::Graph& g, const InteractionParams& p, ad::Var video, ad::Var query, ad::Var s) {
  if (s.rows() != video.rows() || s.cols() != query.rows())
    throw ShapeError("coattend: S " + s.value().shape_string() + " does not match video " +
                     video.value().shape_string() + " and query " + query.value().shape_string());
  const ad::Var projected = ad::matmul(query, g.param(p.ws));
  const ad::Var sr = ad::softmax_rows(s);
  const ad::Var sc = ad::softmax_cols(s);
  const ad::Var a = ad::matmul(sr, projected);
  const ad::Var b = ad::matmul(ad::matmul(sr, ad::transpose(sc)), video);
  return {a, b};
}

ad::Var fuse(ad::Graph& g, const InteractionParams& p, ad::Var video, const CoAttention& att) {
  if (!video.value().same_shape(att.a.value()) || !video.value().same_shape(att.b.value()))
    throw ShapeError("fuse: V " + video.value().shape_string() + ", A " + att.a.value().shape_string() +
                     ", B " + att.b.value().shape_string() + " must share a shape");
  const ad::Var parts[] = {video, att.a, ad::mul(video, att.a), ad::mul(video, att.b)};
  return enc::bigru(g, p.fusion, ad::concat_cols(parts));
}

ad::Var interact(ad::Graph& g, const InteractionParams& p, ad::Var video, ad::Var query) {
  const ad::Var s = similarity(g, p, video, query);
  return fuse(g, p, video, coattend(g, p, video, query, s));
}

}  // namespace ssrn::interaction
