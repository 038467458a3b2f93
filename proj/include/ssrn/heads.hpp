#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssrn/layers.hpp"
#include "ssrn/sampling.hpp"

namespace ssrn::heads {

/// LSTM cell weights, gates packed as [input | forget | cell | output].
/// Store keys: "<prefix>.wx" (in×4H), "<prefix>.u" (H×4H), "<prefix>.b" (1×4H).
struct LstmParams {
  std::string prefix;
  std::size_t in = 0;
  std::size_t hidden = 0;

  static LstmParams create(ad::ParamStore& store, std::string prefix, std::size_t in,
                           std::size_t hidden, num::Rng& rng);
};

/// Unidirectional LSTM over the rows of `seq`, returning the L×H hidden states.
ad::Var lstm_sequence(ad::Graph& g, const LstmParams& p, ad::Var seq);

/// Start LSTM over F~, end LSTM stacked on the start hidden states, one scoring
/// layer per boundary, plus the per-frame offset regressor (D -> 2).
struct SpanPredictorParams {
  LstmParams start_lstm;
  LstmParams end_lstm;
  LinearParams start_score;
  LinearParams end_score;
  LinearParams offset;

  static SpanPredictorParams create(ad::ParamStore& store, const std::string& prefix, std::size_t dim,
                                    std::size_t hidden, num::Rng& rng);
};

struct SpanLogits {
  ad::Var start;  // 1×M
  ad::Var end;    // 1×M
};

struct SpanDistributions {
  std::vector<double> start;
  std::vector<double> end;
};

struct OffsetPredictions {
  std::vector<double> start;
  std::vector<double> end;
};

SpanLogits span_logits(ad::Graph& g, ad::Var features, const SpanPredictorParams& p);
SpanDistributions to_distributions(const SpanLogits& logits);
/// span_logits followed by a softmax over frames.
SpanDistributions span_scores(ad::Graph& g, ad::Var features, const SpanPredictorParams& p);

/// Raw per-frame offsets, M×2 with columns [O_s | O_e].
ad::Var offset_scores(ad::Graph& g, ad::Var features, const SpanPredictorParams& p);
OffsetPredictions to_offsets(ad::Var offsets);

struct SegmentPrediction {
  std::size_t hard_start = 0;
  std::size_t hard_end = 0;
  double score = 0.0;  // P_s(start) * P_e(end)
  double refined_start = 0.0;
  double refined_end = 0.0;
  double time_start = 0.0;
  double time_end = 0.0;
  bool clamped = false;  // refinement produced start > end
};

/// The n best pairs s <= e by P_s(s) * P_e(e); ties go to the smaller s, then
/// the smaller e. Returns fewer than n only when fewer valid pairs exist.
std::vector<SegmentPrediction> decode_top_n(const SpanDistributions& dists, std::size_t n);

struct RefinedPair {
  double start = 0.0;
  double end = 0.0;
  bool clamped = false;
};

/// start = s + 1 - O_s(s), end = e - 1 + O_e(e), clamped into [0, M] with start <= end.
RefinedPair refine(std::size_t hard_start, std::size_t hard_end, const OffsetPredictions& offsets);

/// Fills refined and original-time fields of each prediction.
void finalize(std::vector<SegmentPrediction>& predictions, const OffsetPredictions& offsets,
              const sampling::SamplingPlan& plan);

struct LossTerms {
  ad::Var l1;
  ad::Var l2;
  ad::Var total;
};

struct LossBundle {
  double l1 = 0.0;
  double l2 = 0.0;
  double total = 0.0;
};

/// L1 = CE(P_s, s^) + CE(P_e, e^); L2 = smoothL1(O_s(s^) - Y'_s) + smoothL1(O_e(e^) - Y'_e);
/// total = L1 + lambda * L2. Offsets are only supervised at the label frames.
LossTerms compute_losses(const SpanLogits& logits, ad::Var offsets,
                         const sampling::BoundaryLabels& labels, double lambda);
LossBundle values(const LossTerms& terms);

}  // namespace ssrn::heads
