#include "ssrn/training/data.hpp"

#include <algorithm>
#include <cmath>

#include "ssrn/errors.hpp"
#include "ssrn/numcore/random.hpp"

namespace ssrn::train {

num::Matrix gather_rows(const num::Matrix& frames, const std::vector<std::size_t>& indices) {
  num::Matrix out(indices.size(), frames.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= frames.rows())
      throw IndexError("gather_rows: frame " + std::to_string(indices[i]) + " outside " + frames.shape_string());
    std::copy(frames.row(indices[i]).begin(), frames.row(indices[i]).end(), out.row(i).begin());
  }
  return out;
}

GroundingSample make_sample(const RawSample& raw, std::size_t sampled, std::size_t siamese,
                            sampling::OffsetMode mode) {
  GroundingSample s;
  s.id = raw.id;
  try {
    s.plan = sampling::SamplingPlan::make(raw.dense_frames(), sampled, siamese, mode);
    s.anchor = gather_rows(raw.frames, sampling::anchor_indices(s.plan));
    for (std::size_t k = 1; k <= siamese; ++k)
      s.siamese.push_back(gather_rows(raw.frames, sampling::siamese_indices(s.plan, k)));
    s.query = raw.query;
    s.annotation = raw.annotation;
    s.labels = sampling::map_boundary(raw.annotation, s.plan);
  } catch (const Error& e) {
    throw Error(e.kind(), "sample '" + raw.id + "': " + e.what());
  }
  if (s.query.rows() == 0) throw ValidationError("sample '" + raw.id + "': empty query");
  return s;
}

std::vector<GroundingSample> make_samples(const std::vector<RawSample>& raw, std::size_t sampled,
                                          std::size_t siamese, sampling::OffsetMode mode) {
  std::vector<GroundingSample> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(make_sample(r, sampled, siamese, mode));
  return out;
}

void SyntheticSpec::validate() const {
  if (count == 0) throw ValidationError("synthetic: count must be >= 1");
  if (min_frames < 2 || min_frames > max_frames) throw ValidationError("synthetic: bad frame range");
  if (off_grid_sampled > min_frames) throw ValidationError("synthetic: off_grid_sampled exceeds min_frames");
  if (min_tokens == 0 || min_tokens > max_tokens) throw ValidationError("synthetic: bad token range");
  if (!(min_fraction > 0.0 && min_fraction <= max_fraction && max_fraction <= 1.0))
    throw ValidationError("synthetic: bad segment fraction range");
  if (!(grid_margin >= 0.0 && grid_margin < 0.5)) throw ValidationError("synthetic: grid_margin must lie in [0, 0.5)");
  if (video_dim == 0 || query_dim == 0 || vocabulary == 0) throw ValidationError("synthetic: zero dimension");
  if (!(snr >= 0.0)) throw ValidationError("synthetic: snr must be >= 0");
}

SyntheticSpec synthetic_preset(const std::string& name) {
  SyntheticSpec s;
  if (name == "overfit" || name == "smoke") return s;
  if (name == "bias-stress") {
    s.count = 128;
    s.off_grid_sampled = 16;
    s.grid_margin = 0.2;
    return s;
  }
  throw ValidationError("unknown synthetic preset '" + name + "'");
}

std::vector<double> hash_embedding(const std::string& token, std::size_t dim) {
  num::Rng rng(num::fnv1a(token));
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

namespace {

void normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

}  // namespace

std::vector<double> query_direction(const num::Matrix& query, std::size_t video_dim) {
  std::vector<double> mean(query.cols(), 0.0);
  for (std::size_t i = 0; i < query.rows(); ++i)
    for (std::size_t j = 0; j < query.cols(); ++j) mean[j] += query(i, j);
  std::vector<double> dir(video_dim, 0.0);
  if (video_dim == query.cols()) {
    dir = mean;
  } else {
    // Fixed map between embedding and frame spaces.
    num::Rng rng(0x5353524eULL);
    const num::Matrix map = num::random_normal(query.cols(), video_dim, rng);
    for (std::size_t j = 0; j < query.cols(); ++j)
      for (std::size_t c = 0; c < video_dim; ++c) dir[c] += mean[j] * map(j, c);
  }
  normalize(dir);
  return dir;
}

std::vector<RawSample> synth_dataset(const SyntheticSpec& spec) {
  spec.validate();
  num::Rng rng(spec.seed);
  std::vector<std::string> vocab;
  for (std::size_t w = 0; w < spec.vocabulary; ++w) vocab.push_back("w" + std::to_string(w));

  std::vector<RawSample> out;
  out.reserve(spec.count);
  const double amplitude = std::sqrt(spec.snr * static_cast<double>(spec.video_dim));
  for (std::size_t n = 0; n < spec.count; ++n) {
    RawSample s;
    s.id = "syn" + std::to_string(n);
    const auto T = static_cast<std::size_t>(
        rng.integer(static_cast<std::int64_t>(spec.min_frames), static_cast<std::int64_t>(spec.max_frames)));
    const auto N = static_cast<std::size_t>(
        rng.integer(static_cast<std::int64_t>(spec.min_tokens), static_cast<std::int64_t>(spec.max_tokens)));
    s.query = num::Matrix(N, spec.query_dim);
    for (std::size_t t = 0; t < N; ++t) {
      s.tokens.push_back(vocab[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(vocab.size()) - 1))]);
      const auto e = hash_embedding(s.tokens.back(), spec.query_dim);
      std::copy(e.begin(), e.end(), s.query.row(t).begin());
    }

    const double Td = static_cast<double>(T);
    auto on_grid = [&](double tau) {
      if (spec.off_grid_sampled == 0) return false;
      const double pos = tau * static_cast<double>(spec.off_grid_sampled) / Td;
      const double frac = pos - std::floor(pos);
      return std::min(frac, 1.0 - frac) < spec.grid_margin;
    };
    double start = 0.0, end = 0.0;
    do {
      const double len = rng.uniform(spec.min_fraction, spec.max_fraction) * Td;
      start = rng.uniform(0.0, Td - len);
      end = start + len;
    } while (on_grid(start) || on_grid(end));
    s.annotation = {start, end};

    const auto signal = query_direction(s.query, spec.video_dim);
    std::vector<std::vector<double>> extra_dirs;
    std::vector<std::pair<double, double>> extra_spans;
    for (std::size_t d = 0; d < spec.distractors; ++d) {
      std::vector<double> dir(spec.video_dim);
      for (double& x : dir) x = rng.normal();
      double dot = 0.0;
      for (std::size_t c = 0; c < dir.size(); ++c) dot += dir[c] * signal[c];
      for (std::size_t c = 0; c < dir.size(); ++c) dir[c] -= dot * signal[c];
      normalize(dir);
      const double len = rng.uniform(spec.min_fraction, spec.max_fraction) * Td * 0.5;
      const double ds = rng.uniform(0.0, Td - len);
      extra_dirs.push_back(std::move(dir));
      extra_spans.emplace_back(ds, ds + len);
    }

    s.frames = num::random_normal(T, spec.video_dim, rng);
    for (std::size_t j = 0; j < T; ++j) {
      const double centre = static_cast<double>(j) + 0.5;
      if (centre >= start && centre <= end)
        for (std::size_t c = 0; c < spec.video_dim; ++c) s.frames(j, c) += amplitude * signal[c];
      for (std::size_t d = 0; d < extra_dirs.size(); ++d)
        if (centre >= extra_spans[d].first && centre <= extra_spans[d].second)
          for (std::size_t c = 0; c < spec.video_dim; ++c) s.frames(j, c) += amplitude * extra_dirs[d][c];
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ssrn::train
