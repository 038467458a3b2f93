#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ssrn/numcore/matrix.hpp"
#include "ssrn/sampling.hpp"

namespace ssrn::train {

/// A dense video with one query, before sampling.
struct RawSample {
  std::string id;
  num::Matrix frames;  // T×d_raw
  num::Matrix query;   // N×d_emb
  std::vector<std::string> tokens;
  sampling::BoundaryAnnotation annotation;  // dense-frame units

  std::size_t dense_frames() const { return frames.rows(); }
};

/// One training unit: sampled anchor/siamese features, query and labels.
struct GroundingSample {
  std::string id;
  sampling::SamplingPlan plan;
  num::Matrix anchor;                 // M×d_raw
  std::vector<num::Matrix> siamese;   // K of M×d_raw
  num::Matrix query;                  // N×d_emb
  sampling::BoundaryAnnotation annotation;
  sampling::BoundaryLabels labels;
};

/// Gathers the rows of `frames` at the given indices.
num::Matrix gather_rows(const num::Matrix& frames, const std::vector<std::size_t>& indices);

/// Samples anchor and K siamese sequences and maps the boundary labels.
GroundingSample make_sample(const RawSample& raw, std::size_t sampled, std::size_t siamese,
                            sampling::OffsetMode mode = sampling::OffsetMode::adjacent);

std::vector<GroundingSample> make_samples(const std::vector<RawSample>& raw, std::size_t sampled,
                                          std::size_t siamese, sampling::OffsetMode mode);

struct SyntheticSpec {
  std::size_t count = 32;
  std::size_t min_frames = 100;  // T range, inclusive
  std::size_t max_frames = 300;
  std::size_t video_dim = 16;
  std::size_t query_dim = 16;
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 6;
  std::size_t vocabulary = 48;
  double snr = 1.0;              // per-frame signal power over noise power
  double min_fraction = 0.25;    // segment length as a fraction of T
  double max_fraction = 0.6;
  std::size_t distractors = 1;   // segments carrying an unrelated direction
  /// When nonzero, boundaries are resampled until tau*M/T is at least
  /// `grid_margin` away from an integer for this M.
  std::size_t off_grid_sampled = 0;
  double grid_margin = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// "overfit" (the 32-sample smoke benchmark) or "bias-stress" (all boundaries off
/// the M=16 grid, larger and noisier).
SyntheticSpec synthetic_preset(const std::string& name);

/// Noise frames everywhere; frames inside [start, end] additionally carry the
/// query direction at the requested SNR. Same settings, same dataset, bit for bit.
std::vector<RawSample> synth_dataset(const SyntheticSpec& spec);

/// Deterministic embedding for a token with no entry in an embedding table.
std::vector<double> hash_embedding(const std::string& token, std::size_t dim);

/// Unit direction a query induces in raw frame space.
std::vector<double> query_direction(const num::Matrix& query, std::size_t video_dim);

}  // namespace ssrn::train
