#include "ssrn/heads.hpp"

#include <algorithm>
#include <cmath>

#include "ssrn/errors.hpp"
#include "ssrn/numcore/ops.hpp"

namespace ssrn::heads {

LstmParams LstmParams::create(ad::ParamStore& store, std::string prefix, std::size_t in,
                              std::size_t hidden, num::Rng& rng) {
  LstmParams p{std::move(prefix), in, hidden};
  store.add(p.prefix + ".wx", xavier(in, 4 * hidden, rng));
  store.add(p.prefix + ".u", xavier(hidden, 4 * hidden, rng));
  num::Matrix bias(1, 4 * hidden);
  for (std::size_t j = hidden; j < 2 * hidden; ++j) bias(0, j) = 1.0;  // forget gate
  store.add(p.prefix + ".b", std::move(bias));
  return p;
}

ad::Var lstm_sequence(ad::Graph& g, const LstmParams& p, ad::Var seq) {
  const std::size_t L = seq.rows(), H = p.hidden;
  if (L == 0) throw ValidationError("lstm_sequence " + p.prefix + ": empty sequence");
  if (seq.cols() != p.in)
    throw ShapeError("lstm_sequence " + p.prefix + ": input " + seq.value().shape_string() +
                     " does not match in=" + std::to_string(p.in));
  const ad::Var xp = ad::add_row(ad::matmul(seq, g.param(p.prefix + ".wx")), g.param(p.prefix + ".b"));
  const ad::Var u = g.param(p.prefix + ".u");
  ad::Var h = g.constant(num::Matrix(1, H));
  ad::Var c = g.constant(num::Matrix(1, H));
  std::vector<ad::Var> states;
  states.reserve(L);
  for (std::size_t t = 0; t < L; ++t) {
    const ad::Var pre = ad::add(ad::slice_rows(xp, t, 1), ad::matmul(h, u));
    const ad::Var ifg = ad::sigmoid(ad::slice_cols(pre, 0, 2 * H));
    const ad::Var cand = ad::tanh(ad::slice_cols(pre, 2 * H, H));
    const ad::Var out = ad::sigmoid(ad::slice_cols(pre, 3 * H, H));
    c = ad::add(ad::mul(ad::slice_cols(ifg, H, H), c), ad::mul(ad::slice_cols(ifg, 0, H), cand));
    h = ad::mul(out, ad::tanh(c));
    states.push_back(h);
  }
  return ad::concat_rows(states);
}

SpanPredictorParams SpanPredictorParams::create(ad::ParamStore& store, const std::string& prefix,
                                                std::size_t dim, std::size_t hidden, num::Rng& rng) {
  SpanPredictorParams p;
  p.start_lstm = LstmParams::create(store, prefix + ".start_lstm", dim, hidden, rng);
  p.end_lstm = LstmParams::create(store, prefix + ".end_lstm", hidden, hidden, rng);
  p.start_score = LinearParams::create(store, prefix + ".start_ff", hidden, 1, rng);
  p.end_score = LinearParams::create(store, prefix + ".end_ff", hidden, 1, rng);
  p.offset = LinearParams::create(store, prefix + ".offset_ff", dim, 2, rng);
  return p;
}

SpanLogits span_logits(ad::Graph& g, ad::Var features, const SpanPredictorParams& p) {
  if (features.rows() < 2)
    throw ShapeError("span_scores: need M >= 2 frames, got " + features.value().shape_string());
  const ad::Var hs = lstm_sequence(g, p.start_lstm, features);
  const ad::Var he = lstm_sequence(g, p.end_lstm, hs);
  return {ad::transpose(p.start_score.forward(g, hs)), ad::transpose(p.end_score.forward(g, he))};
}

SpanDistributions to_distributions(const SpanLogits& logits) {
  const auto ps = num::softmax_rows(logits.start.value());
  const auto pe = num::softmax_rows(logits.end.value());
  return {{ps.data().begin(), ps.data().end()}, {pe.data().begin(), pe.data().end()}};
}

SpanDistributions span_scores(ad::Graph& g, ad::Var features, const SpanPredictorParams& p) {
  return to_distributions(span_logits(g, features, p));
}

ad::Var offset_scores(ad::Graph& g, ad::Var features, const SpanPredictorParams& p) {
  return p.offset.forward(g, features);
}

OffsetPredictions to_offsets(ad::Var offsets) {
  const num::Matrix& v = offsets.value();
  if (v.cols() != 2) throw ShapeError("to_offsets: expected M×2, got " + v.shape_string());
  OffsetPredictions o;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    o.start.push_back(v(i, 0));
    o.end.push_back(v(i, 1));
  }
  return o;
}

namespace {

// Emission order of decoded pairs: higher joint score first, then smaller
// start, then smaller end.
bool emitted_before(const SegmentPrediction& a, const SegmentPrediction& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.hard_start != b.hard_start) return a.hard_start < b.hard_start;
  return a.hard_end < b.hard_end;
}

}  // namespace

std::vector<SegmentPrediction> decode_top_n(const SpanDistributions& dists, std::size_t n) {
  const std::size_t M = dists.start.size();
  if (dists.end.size() != M)
    throw ShapeError("decode_top_n: start/end lengths " + std::to_string(M) + " and " +
                     std::to_string(dists.end.size()) + " differ");
  if (n == 0) throw ValidationError("decode_top_n: n must be >= 1");

  // Any global top-n pair is among the n best ends of its own start, so select
  // per start first and merge the survivors.
  std::vector<SegmentPrediction> pool;
  std::vector<SegmentPrediction> row;
  for (std::size_t s = 0; s < M; ++s) {
    row.clear();
    for (std::size_t e = s; e < M; ++e) row.push_back({s, e, dists.start[s] * dists.end[e]});
    const std::size_t keep = std::min(n, row.size());
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), row.end(), emitted_before);
    pool.insert(pool.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  const std::size_t keep = std::min(n, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(), emitted_before);
  pool.resize(keep);
  return pool;
}

RefinedPair refine(std::size_t hard_start, std::size_t hard_end, const OffsetPredictions& offsets) {
  const std::size_t M = offsets.start.size();
  if (hard_start >= M || hard_end >= M || offsets.end.size() != M)
    throw IndexError("refine: pair (" + std::to_string(hard_start) + ", " + std::to_string(hard_end) +
                     ") outside offsets of length " + std::to_string(M));
  const double top = static_cast<double>(M);
  RefinedPair r;
  r.start = std::clamp(static_cast<double>(hard_start) + 1.0 - offsets.start[hard_start], 0.0, top);
  r.end = std::clamp(static_cast<double>(hard_end) - 1.0 + offsets.end[hard_end], 0.0, top);
  if (r.start > r.end) {
    r.start = r.end;
    r.clamped = true;
  }
  return r;
}

void finalize(std::vector<SegmentPrediction>& predictions, const OffsetPredictions& offsets,
              const sampling::SamplingPlan& plan) {
  for (auto& p : predictions) {
    const RefinedPair r = refine(p.hard_start, p.hard_end, offsets);
    p.refined_start = r.start;
    p.refined_end = r.end;
    p.clamped = r.clamped;
    p.time_start = sampling::unmap_index(r.start, plan);
    p.time_end = sampling::unmap_index(r.end, plan);
  }
}

LossTerms compute_losses(const SpanLogits& logits, ad::Var offsets,
                         const sampling::BoundaryLabels& labels, double lambda) {
  const std::size_t M = logits.start.value().size();
  if (labels.hard_start >= M || labels.hard_end >= M)
    throw ValidationError("compute_losses: label indices (" + std::to_string(labels.hard_start) +
                          ", " + std::to_string(labels.hard_end) + ") outside [0, " +
                          std::to_string(M - 1) + "]");
  if (offsets.rows() != M || offsets.cols() != 2)
    throw ShapeError("compute_losses: offsets " + offsets.value().shape_string() + " do not match M=" +
                     std::to_string(M));
  const ad::Var l1 = ad::add(ad::cross_entropy(logits.start, labels.hard_start),
                             ad::cross_entropy(logits.end, labels.hard_end));
  const double ys[] = {labels.offset_start};
  const double ye[] = {labels.offset_end};
  const ad::Var l2 = ad::add(ad::smooth_l1(ad::pick(offsets, labels.hard_start, 0), ys),
                             ad::smooth_l1(ad::pick(offsets, labels.hard_end, 1), ye));
  return {l1, l2, ad::add(l1, ad::scale(l2, lambda))};
}

LossBundle values(const LossTerms& terms) {
  return {terms.l1.value()(0, 0), terms.l2.value()(0, 0), terms.total.value()(0, 0)};
}

}  // namespace ssrn::heads
