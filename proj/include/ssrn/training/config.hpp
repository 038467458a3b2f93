#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "ssrn/sampling.hpp"
#include "ssrn/siamese.hpp"

namespace ssrn::train {

/// Everything that shapes the network's parameters and forward pass.
struct ModelConfig {
  std::size_t video_dim = 16;  // raw per-frame feature width
  std::size_t query_dim = 16;  // per-token embedding width
  std::size_t dim = 32;        // D
  std::size_t sampled = 16;    // M
  std::size_t siamese = 2;     // K
  std::size_t rnn_layers = 1;
  double alpha = 0.5;
  bool use_siamese = true;
  siamese::AggregationMode aggregation = siamese::AggregationMode::cosine;
  siamese::ReasoningMode reasoning = siamese::ReasoningMode::residual;
  sampling::OffsetMode offset_mode = sampling::OffsetMode::adjacent;

  /// Number of siamese streams actually fed to the network.
  std::size_t active_siamese() const { return use_siamese ? siamese : 0; }
  void validate() const;
};

struct TrainConfig {
  ModelConfig model;
  double lambda = 1.0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  std::size_t max_steps = 500;
  std::uint64_t seed = 1;
  bool soft_label = true;      // train the offset head and decode refined boundaries
  std::size_t threads = 1;
  std::size_t eval_every = 0;  // 0 disables periodic evaluation

  // Data sources; either annotation files or a synthetic preset.
  std::string train_annotations;
  std::string test_annotations;
  std::string features_dir;
  std::string embeddings;
  std::string synthetic_preset;
  std::size_t synthetic_count = 0;  // 0 keeps the preset's count
  std::uint64_t synthetic_seed = 0;  // 0 derives from seed
  double fps = 0.0;                  // used for second-based annotations

  std::string checkpoint;  // output/input path
  std::string loss_log;    // optional CSV of per-step losses

  void validate() const;
};

/// Full-scale defaults per benchmark dataset: D=512, K=4, batch 64. M and learning rate depend on the
/// dataset (200 and 8e-4 for ActivityNet Captions, 200 and 3e-4 for TACoS,
/// 64 and 4e-4 for Charades-STA).
TrainConfig dataset_defaults(const std::string& dataset);

/// Desk-scale preset used by the synthetic overfit benchmark.
TrainConfig desk_defaults();

}  // namespace ssrn::train
