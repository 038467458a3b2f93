#include "ssrn/encoders.hpp"

#include <cmath>

#include "ssrn/errors.hpp"
#include "ssrn/numcore/ops.hpp"

namespace ssrn::enc {

num::Matrix positional_encoding(std::size_t length, std::size_t dim) {
  if (dim % 2 != 0) throw ValidationError("positional_encoding: dimension " + std::to_string(dim) + " is odd");
  num::Matrix pe(length, dim);
  for (std::size_t p = 0; p < length; ++p) {
    for (std::size_t i = 0; i < dim; i += 2) {
      const double angle = static_cast<double>(p) /
                           std::pow(10000.0, static_cast<double>(i) / static_cast<double>(dim));
      pe(p, i) = std::sin(angle);
      pe(p, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

GruParams GruParams::create(ad::ParamStore& store, std::string prefix, std::size_t in,
                            std::size_t hidden, num::Rng& rng) {
  GruParams p{std::move(prefix), in, hidden};
  store.add(p.prefix + ".wx", xavier(in, 3 * hidden, rng));
  store.add(p.prefix + ".uzr", xavier(hidden, 2 * hidden, rng));
  store.add(p.prefix + ".uh", xavier(hidden, hidden, rng));
  store.add(p.prefix + ".b", num::Matrix(1, 3 * hidden));
  return p;
}

namespace {

// xp is the 1×3H input projection x Wx + b for this step.
ad::Var gru_step(ad::Graph& g, const GruParams& p, ad::Var xp, ad::Var h) {
  const std::size_t H = p.hidden;
  const ad::Var hz = ad::matmul(h, g.param(p.prefix + ".uzr"));
  const ad::Var gates = ad::sigmoid(ad::add(ad::slice_cols(xp, 0, 2 * H), hz));
  const ad::Var z = ad::slice_cols(gates, 0, H);
  const ad::Var r = ad::slice_cols(gates, H, H);
  const ad::Var cand = ad::tanh(
      ad::add(ad::slice_cols(xp, 2 * H, H), ad::matmul(ad::mul(r, h), g.param(p.prefix + ".uh"))));
  // (1 - z) * h~ + z * h  ==  h~ + z * (h - h~)
  return ad::add(cand, ad::mul(z, ad::sub(h, cand)));
}

void check_rows(const char* op, const GruParams& p, ad::Var x, ad::Var h) {
  if (x.cols() != p.in || h.cols() != p.hidden || h.rows() != x.rows())
    throw ShapeError(std::string(op) + " " + p.prefix + ": input " + x.value().shape_string() +
                     " and state " + h.value().shape_string() + " do not match in=" +
                     std::to_string(p.in) + " hidden=" + std::to_string(p.hidden));
}

}  // namespace

ad::Var gru_cell(ad::Graph& g, const GruParams& p, ad::Var x, ad::Var h) {
  check_rows("gru_cell", p, x, h);
  const ad::Var xp = ad::add_row(ad::matmul(x, g.param(p.prefix + ".wx")), g.param(p.prefix + ".b"));
  return gru_step(g, p, xp, h);
}

ad::Var gru_sequence(ad::Graph& g, const GruParams& p, ad::Var seq, bool reverse) {
  const std::size_t L = seq.rows();
  if (L == 0) throw ValidationError("gru_sequence " + p.prefix + ": empty sequence");
  if (seq.cols() != p.in)
    throw ShapeError("gru_sequence " + p.prefix + ": input " + seq.value().shape_string() +
                     " does not match in=" + std::to_string(p.in));
  const ad::Var xp = ad::add_row(ad::matmul(seq, g.param(p.prefix + ".wx")), g.param(p.prefix + ".b"));
  std::vector<ad::Var> states(L);
  ad::Var h = g.constant(num::Matrix(1, p.hidden));
  for (std::size_t step = 0; step < L; ++step) {
    const std::size_t t = reverse ? L - 1 - step : step;
    h = gru_step(g, p, ad::slice_rows(xp, t, 1), h);
    states[t] = h;
  }
  return ad::concat_rows(states);
}

BiGruParams BiGruParams::create(ad::ParamStore& store, const std::string& prefix, std::size_t in,
                                std::size_t out, num::Rng& rng, std::size_t layers) {
  if (out % 2 != 0) throw ValidationError("BiGruParams " + prefix + ": output width " + std::to_string(out) + " is odd");
  if (layers == 0) throw ValidationError("BiGruParams " + prefix + ": need at least one layer");
  BiGruParams p;
  p.in = in;
  p.out = out;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t layer_in = l == 0 ? in : out;
    const std::string tag = layers == 1 ? prefix : prefix + ".l" + std::to_string(l);
    p.forward.push_back(GruParams::create(store, tag + ".fw", layer_in, out / 2, rng));
    p.backward.push_back(GruParams::create(store, tag + ".bw", layer_in, out / 2, rng));
  }
  return p;
}

ad::Var bigru(ad::Graph& g, const BiGruParams& p, ad::Var seq) {
  if (seq.rows() == 0) throw ValidationError("bigru: empty sequence");
  ad::Var x = seq;
  for (std::size_t l = 0; l < p.forward.size(); ++l) {
    const ad::Var parts[] = {gru_sequence(g, p.forward[l], x, false),
                             gru_sequence(g, p.backward[l], x, true)};
    x = ad::concat_cols(parts);
  }
  return x;
}

EncoderParams EncoderParams::create(ad::ParamStore& store, const std::string& prefix,
                                    std::size_t raw_dim, std::size_t dim, num::Rng& rng,
                                    std::size_t layers) {
  if (dim % 2 != 0) throw ValidationError("EncoderParams " + prefix + ": D=" + std::to_string(dim) + " is odd");
  EncoderParams p;
  p.projection = LinearParams::create(store, prefix + ".proj", raw_dim, dim, rng);
  p.rnn = BiGruParams::create(store, prefix + ".rnn", dim, dim, rng, layers);
  return p;
}

ad::Var encode(ad::Graph& g, const EncoderParams& p, ad::Var raw) {
  if (raw.rows() == 0) throw ValidationError("encode: empty sequence");
  const ad::Var projected = p.projection.forward(g, raw);
  const ad::Var pe = g.constant(positional_encoding(raw.rows(), p.dim()));
  return bigru(g, p.rnn, ad::add(projected, pe));
}

}  // namespace ssrn::enc
