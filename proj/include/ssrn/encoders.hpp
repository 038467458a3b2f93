#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssrn/layers.hpp"
#include "ssrn/numcore/graph.hpp"

namespace ssrn::enc {

/// Sinusoidal table: PE[p, 2i] = sin(p / 10000^(2i/D)), PE[p, 2i+1] = cos(...).
/// Raises ValidationError for odd D.
num::Matrix positional_encoding(std::size_t length, std::size_t dim);

/// GRU cell weights, gates packed as [update | reset | candidate]:
///   z  = sigmoid(x Wz + h Uz + bz)
///   r  = sigmoid(x Wr + h Ur + br)
///   h~ = tanh(x Wh + (r * h) Uh + bh)
///   h' = (1 - z) * h~ + z * h
/// Store keys: "<prefix>.wx" (in x 3H), "<prefix>.uzr" (H x 2H), "<prefix>.uh" (H x H),
/// "<prefix>.b" (1 x 3H).
struct GruParams {
  std::string prefix;
  std::size_t in = 0;
  std::size_t hidden = 0;

  static GruParams create(ad::ParamStore& store, std::string prefix, std::size_t in,
                          std::size_t hidden, num::Rng& rng);
};

/// One GRU update for a single 1×in input row and 1×H state.
ad::Var gru_cell(ad::Graph& g, const GruParams& p, ad::Var x, ad::Var h);

/// Runs a GRU over the rows of `seq` (L×in), optionally right to left; the
/// returned L×H rows are in input order either way.
ad::Var gru_sequence(ad::Graph& g, const GruParams& p, ad::Var seq, bool reverse);

/// Stacked bidirectional GRU; each direction has D/2 hidden units and outputs
/// are concatenated per step as [forward | backward].
struct BiGruParams {
  std::vector<GruParams> forward;
  std::vector<GruParams> backward;
  std::size_t in = 0;
  std::size_t out = 0;

  static BiGruParams create(ad::ParamStore& store, const std::string& prefix, std::size_t in,
                            std::size_t out, num::Rng& rng, std::size_t layers = 1);
};

ad::Var bigru(ad::Graph& g, const BiGruParams& p, ad::Var seq);

/// Linear projection to D, plus positional encoding, then Bi-GRU.
struct EncoderParams {
  LinearParams projection;
  BiGruParams rnn;

  static EncoderParams create(ad::ParamStore& store, const std::string& prefix, std::size_t raw_dim,
                              std::size_t dim, num::Rng& rng, std::size_t layers = 1);
  std::size_t raw_dim() const { return projection.in; }
  std::size_t dim() const { return rnn.out; }
};

ad::Var encode(ad::Graph& g, const EncoderParams& p, ad::Var raw);

/// M×d_raw sampled frame features to M×D.
inline ad::Var encode_video(ad::Graph& g, const EncoderParams& p, ad::Var raw) { return encode(g, p, raw); }
/// N×d_emb token embeddings to N×D.
inline ad::Var encode_query(ad::Graph& g, const EncoderParams& p, ad::Var tokens) { return encode(g, p, tokens); }

}  // namespace ssrn::enc
